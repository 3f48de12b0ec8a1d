# -*- mode:python; coding:utf-8; -*-

"""Run and perturbation manifests stored as JSON next to their outputs."""

import json
import os
from typing import Type, TypeVar

from filelock import FileLock
from pydantic import BaseModel

from infomgf.shared.config_loader import get_config_dict_from_yaml
from infomgf.shared.models import RunManifest, TrainConfig
from infomgf.shared.utils.path_utils import get_abspath

__all__ = [
    'MANIFEST_FILE',
    'PERTURB_MANIFEST_FILE',
    'load_manifest',
    'manifest_config',
    'save_manifest',
]

MANIFEST_FILE = 'manifest.json'
PERTURB_MANIFEST_FILE = 'perturb_manifest.json'

ManifestT = TypeVar('ManifestT', bound=BaseModel)


def save_manifest(manifest: BaseModel, path: str) -> str:
    path = get_abspath(path)
    with FileLock(f'{path}.lock'):
        with open(path, 'wt') as fd:
            json.dump(manifest.model_dump(mode='json'), fd, indent=2,
                      sort_keys=True)
    return path


def load_manifest(
    path: str,
    manifest_class: Type[ManifestT] = RunManifest,
) -> ManifestT:
    path = get_abspath(path)
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_FILE)
    return get_config_dict_from_yaml(path, manifest_class)


def manifest_config(manifest: RunManifest) -> TrainConfig:
    return TrainConfig.model_validate(manifest.config)

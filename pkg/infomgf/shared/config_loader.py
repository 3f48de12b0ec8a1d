import os
from typing import Type, TypeVar

import yaml
from pydantic import BaseModel

from infomgf.shared.exceptions import ConfigNotFoundError

__all__ = ['get_config_dict_from_yaml', 'load_yaml']

ModelT = TypeVar('ModelT', bound=BaseModel)


def load_yaml(file_path: str) -> dict:
    # JSON documents are valid YAML, so both config flavours load here
    if not os.path.exists(file_path):
        raise ConfigNotFoundError(f'Cannot load file {file_path}')
    with open(file_path, 'rt') as f:
        return yaml.safe_load(f) or {}


def get_config_dict_from_yaml(
    file_path: str,
    config_class: Type[ModelT],
) -> ModelT:
    return config_class.model_validate(load_yaml(file_path))

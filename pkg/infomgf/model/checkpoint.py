# -*- mode:python; coding:utf-8; -*-

"""
Checkpoint format: 8-byte magic, little-endian uint64 header length,
JSON header ``{"arrays": {name: {"shape", "offset"}}, "meta": {...}}``,
then the float64 arrays back to back (offsets relative to the data
section).
"""

import json
import struct
from typing import Any, Dict, Optional, Tuple

import numpy as np
import torch

from infomgf.shared.exceptions import CheckpointError

__all__ = ['load_checkpoint', 'save_checkpoint', 'restore_model']

MAGIC = b'IMGFCKP1'
_DTYPE = np.dtype('<f8')


def save_checkpoint(
    arrays: Dict[str, torch.Tensor],
    path: str,
    meta: Optional[Dict[str, Any]] = None,
) -> None:
    header = {'arrays': {}, 'meta': meta or {}}
    blobs = []
    offset = 0
    for name in sorted(arrays):
        data = arrays[name].detach().cpu().numpy().astype(_DTYPE)
        header['arrays'][name] = {'shape': list(data.shape), 'offset': offset}
        blob = np.ascontiguousarray(data).tobytes()
        blobs.append(blob)
        offset += len(blob)
    encoded = json.dumps(header, sort_keys=True).encode('utf-8')
    with open(path, 'wb') as fd:
        fd.write(MAGIC)
        fd.write(struct.pack('<Q', len(encoded)))
        fd.write(encoded)
        for blob in blobs:
            fd.write(blob)


def load_checkpoint(
    path: str,
) -> Tuple[Dict[str, torch.Tensor], Dict[str, Any]]:
    with open(path, 'rb') as fd:
        raw = fd.read()
    if raw[:len(MAGIC)] != MAGIC:
        raise CheckpointError(f'{path}: not a checkpoint file')
    start = len(MAGIC) + 8
    (header_len,) = struct.unpack('<Q', raw[len(MAGIC):start])
    try:
        header = json.loads(raw[start:start + header_len].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f'{path}: corrupted header') from exc
    data = memoryview(raw)[start + header_len:]
    arrays = {}
    for name, entry in header['arrays'].items():
        count = int(np.prod(entry['shape'], dtype=np.int64))
        end = entry['offset'] + count * _DTYPE.itemsize
        if end > len(data):
            raise CheckpointError(f'{path}: array "{name}" is truncated')
        array = np.frombuffer(
            data[entry['offset']:end], dtype=_DTYPE,
        ).reshape(entry['shape'])
        arrays[name] = torch.from_numpy(array.copy())
    return arrays, header.get('meta', {})


def restore_model(model: torch.nn.Module, path: str) -> Dict[str, Any]:
    """Loads parameters into ``model``; returns the stored meta block."""
    arrays, meta = load_checkpoint(path)
    expected = dict(model.named_parameters())
    if set(arrays) != set(expected):
        missing = sorted(set(expected) - set(arrays))
        extra = sorted(set(arrays) - set(expected))
        raise CheckpointError(
            f'{path}: parameter mismatch, missing {missing}, unexpected {extra}'
        )
    with torch.no_grad():
        for name, param in expected.items():
            if tuple(arrays[name].shape) != tuple(param.shape):
                raise CheckpointError(
                    f'{path}: "{name}" has shape {tuple(arrays[name].shape)},'
                    f' expected {tuple(param.shape)}'
                )
            param.copy_(arrays[name])
    return meta

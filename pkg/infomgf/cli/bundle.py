# -*- mode:python; coding:utf-8; -*-

"""
Dataset bundle directory:

    meta.json        {"n", "v", "d_f", "class_count", "view_names"}
    features.bin     row-major little-endian float32, n x d_f
    view_<i>.edges   "src<TAB>dst" per line, src < dst, undirected
    labels.txt       one class id per line (optional)
    splits.json      {"train": [...], "val": [...], "test": [...]} (optional)
"""

import json
import os
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pydantic
import torch

from infomgf.evaluation.classification import SplitSpec
from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.sparse import SparseMatrix
from infomgf.shared.exceptions import ContractError, DatasetError
from infomgf.shared.models import DatasetMeta
from infomgf.shared.utils.file_utils import hash_files
from infomgf.shared.utils.path_utils import ensure_dir, get_abspath

__all__ = [
    'DatasetBundle',
    'bundle_files',
    'bundle_hash',
    'read_edges',
    'read_matrix_bin',
    'read_weighted_edges',
    'write_edges',
    'write_matrix_bin',
    'write_weighted_edges',
]

META_FILE = 'meta.json'
FEATURES_FILE = 'features.bin'
LABELS_FILE = 'labels.txt'
SPLITS_FILE = 'splits.json'
_F32 = np.dtype('<f4')


def view_file(idx: int) -> str:
    return f'view_{idx}.edges'


def read_matrix_bin(path: str, n_rows: int, n_cols: int) -> torch.Tensor:
    """Reads a float32 matrix file and promotes it to float64."""
    if not os.path.exists(path):
        raise DatasetError(f'{path}: file is missing')
    data = np.fromfile(path, dtype=_F32)
    if data.size != n_rows * n_cols:
        raise DatasetError(
            f'{path}: expected {n_rows}x{n_cols} float32 values, '
            f'found {data.size}'
        )
    return torch.from_numpy(data.reshape(n_rows, n_cols).astype(np.float64))


def write_matrix_bin(path: str, matrix: torch.Tensor):
    matrix.detach().cpu().numpy().astype(_F32).tofile(path)


def read_edges(path: str, n: int) -> Tuple[np.ndarray, np.ndarray]:
    if not os.path.exists(path):
        raise DatasetError(f'{path}: file is missing')
    src, dst = [], []
    with open(path, 'rt') as fd:
        for line_no, line in enumerate(fd, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split('\t')
            if len(parts) != 2:
                raise DatasetError(
                    f'{path}:{line_no}: expected "src<TAB>dst", got {line!r}'
                )
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise DatasetError(
                    f'{path}:{line_no}: non-integer node id in {line!r}'
                ) from exc
            if not 0 <= i < j < n:
                raise DatasetError(
                    f'{path}:{line_no}: edge ({i}, {j}) must satisfy '
                    f'0 <= src < dst < {n}'
                )
            src.append(i)
            dst.append(j)
    return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)


def write_edges(path: str, view: SparseMatrix):
    rows = view.rows.tolist()
    cols = view.cols.tolist()
    with open(path, 'wt') as fd:
        for i, j in zip(rows, cols):
            if i < j:
                fd.write(f'{i}\t{j}\n')


def _read_labels(path: str, n: int, class_count: int) -> np.ndarray:
    labels = []
    with open(path, 'rt') as fd:
        for line_no, line in enumerate(fd, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                label = int(line)
            except ValueError as exc:
                raise DatasetError(
                    f'{path}:{line_no}: non-integer label {line!r}'
                ) from exc
            if class_count and not 0 <= label < class_count:
                raise DatasetError(
                    f'{path}:{line_no}: label {label} outside '
                    f'[0, {class_count})'
                )
            labels.append(label)
    if len(labels) != n:
        raise DatasetError(f'{path}: expected {n} labels, found {len(labels)}')
    return np.asarray(labels, dtype=np.int64)


def _read_splits(path: str, n: int) -> SplitSpec:
    try:
        with open(path, 'rt') as fd:
            split = SplitSpec.from_dict(json.load(fd))
        split.validate(n)
    except (json.JSONDecodeError, ContractError, AttributeError) as exc:
        raise DatasetError(f'{path}: {exc}') from exc
    return split


def bundle_files(root: str) -> List[str]:
    known = {META_FILE, FEATURES_FILE, LABELS_FILE, SPLITS_FILE}
    return sorted(
        os.path.join(root, name) for name in os.listdir(root)
        if name in known or (
            name.startswith('view_') and name.endswith('.edges')
        )
    )


def bundle_hash(root: str) -> str:
    """Content hash of the bundle's data files."""
    root = get_abspath(root)
    return hash_files(bundle_files(root), root=root)


@dataclass(eq=False)
class DatasetBundle:
    root: str
    graph: MultiplexGraph
    split: Optional[SplitSpec] = None

    @property
    def meta(self) -> DatasetMeta:
        return DatasetMeta(
            n=self.graph.n_nodes,
            v=self.graph.n_views,
            d_f=self.graph.feature_dim,
            class_count=self.graph.class_count,
            view_names=list(self.graph.view_names),
        )

    @classmethod
    def load(cls, root: str) -> 'DatasetBundle':
        root = get_abspath(root)
        meta_path = os.path.join(root, META_FILE)
        if not os.path.isdir(root) or not os.path.exists(meta_path):
            raise DatasetError(f'{root}: not a dataset bundle (no {META_FILE})')
        try:
            with open(meta_path, 'rt') as fd:
                meta = DatasetMeta.model_validate(json.load(fd))
        except (json.JSONDecodeError, pydantic.ValidationError) as exc:
            raise DatasetError(f'{meta_path}: {exc}') from exc
        features = read_matrix_bin(
            os.path.join(root, FEATURES_FILE), meta.n, meta.d_f,
        )
        views = []
        for idx in range(meta.v):
            src, dst = read_edges(os.path.join(root, view_file(idx)), meta.n)
            views.append(SparseMatrix.from_edges(meta.n, src, dst))
        labels = None
        labels_path = os.path.join(root, LABELS_FILE)
        if os.path.exists(labels_path):
            labels = _read_labels(labels_path, meta.n, meta.class_count)
        split = None
        splits_path = os.path.join(root, SPLITS_FILE)
        if os.path.exists(splits_path):
            split = _read_splits(splits_path, meta.n)
        graph = MultiplexGraph(
            views=views,
            features=features,
            labels=labels,
            class_count=meta.class_count,
            view_names=list(meta.view_names),
        )
        return cls(root=root, graph=graph, split=split)

    def save(self, root: Optional[str] = None) -> str:
        root = ensure_dir(root or self.root)
        with open(os.path.join(root, META_FILE), 'wt') as fd:
            json.dump(self.meta.model_dump(), fd, indent=2, sort_keys=True)
        write_matrix_bin(
            os.path.join(root, FEATURES_FILE), self.graph.features,
        )
        for idx, view in enumerate(self.graph.views):
            write_edges(os.path.join(root, view_file(idx)), view)
        if self.graph.has_labels:
            with open(os.path.join(root, LABELS_FILE), 'wt') as fd:
                fd.writelines(f'{label}\n' for label in self.graph.labels)
        if self.split is not None:
            with open(os.path.join(root, SPLITS_FILE), 'wt') as fd:
                json.dump(self.split.as_dict(), fd)
        self.root = root
        return root


def write_weighted_edges(path: str, a: SparseMatrix):
    """Upper triangle of a symmetric weighted matrix, diagonal included."""
    rows = a.rows.tolist()
    cols = a.cols.tolist()
    values = a.values.detach().tolist()
    with open(path, 'wt') as fd:
        for i, j, w in zip(rows, cols, values):
            if i <= j:
                fd.write(f'{i}\t{j}\t{w!r}\n')


def read_weighted_edges(path: str, n: int) -> SparseMatrix:
    src, dst, weights = [], [], []
    with open(path, 'rt') as fd:
        for line_no, line in enumerate(fd, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
            except (ValueError, IndexError) as exc:
                raise DatasetError(
                    f'{path}:{line_no}: expected "src<TAB>dst<TAB>w"'
                ) from exc
            if not 0 <= i <= j < n:
                raise DatasetError(
                    f'{path}:{line_no}: entry ({i}, {j}) outside the upper '
                    f'triangle of a {n}x{n} matrix'
                )
            src.append(i)
            dst.append(j)
            weights.append(w)
    return SparseMatrix.from_edges(n, src, dst, weights)

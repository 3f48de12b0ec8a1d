# -*- mode:python; coding:utf-8; -*-

"""Multiplex graph: several adjacency views over one node set."""

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np
import torch

from infomgf.graph.sparse import SparseMatrix
from infomgf.shared.exceptions import DatasetError

__all__ = ['MultiplexGraph']


@dataclass(frozen=True, eq=False)
class MultiplexGraph:
    views: List[SparseMatrix]
    features: torch.Tensor
    labels: Optional[np.ndarray] = None
    class_count: int = 0
    view_names: List[str] = field(default_factory=list)
    binary: bool = True

    def __post_init__(self):
        if not self.views:
            raise DatasetError('A multiplex graph needs at least one view')
        n = self.features.shape[0]
        if self.features.dtype != torch.float64:
            object.__setattr__(
                self, 'features', self.features.to(torch.float64),
            )
        for idx, view in enumerate(self.views):
            if view.n_rows != n or view.n_cols != n:
                raise DatasetError(
                    f'View {idx} is {view.n_rows}x{view.n_cols}, '
                    f'expected {n}x{n}'
                )
            view.validate()
            if not view.is_symmetric():
                raise DatasetError(f'View {idx} is not symmetric')
            if self.binary and view.nnz and not bool(
                ((view.values == 0) | (view.values == 1)).all()
            ):
                raise DatasetError(f'View {idx} is not binary')
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (n,):
                raise DatasetError(
                    f'Expected {n} labels, got {labels.shape[0]}'
                )
            class_count = self.class_count or int(labels.max()) + 1
            if labels.min() < 0 or labels.max() >= class_count:
                raise DatasetError(
                    f'Label ids must lie in [0, {class_count})'
                )
            object.__setattr__(self, 'labels', labels)
            object.__setattr__(self, 'class_count', class_count)
        if not self.view_names:
            object.__setattr__(
                self,
                'view_names',
                [f'view_{i}' for i in range(len(self.views))],
            )
        if len(self.view_names) != len(self.views):
            raise DatasetError('view_names must have one entry per view')

    @property
    def n_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def edge_counts(self) -> List[int]:
        """Undirected edge count per view (self-loops excluded)."""
        return [len(view.edge_set()) for view in self.views]

    def replace(self, **changes) -> 'MultiplexGraph':
        return replace(self, **changes)

# -*- mode:python; coding:utf-8; -*-

"""Parameter-free view-specific feature propagation."""

from dataclasses import dataclass
from typing import List

import torch

from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.ops import normalize_sym
from infomgf.graph.sparse import spmm
from infomgf.shared.exceptions import ContractError, DimensionError
from infomgf.shared.utils.log_utils import get_logger

__all__ = ['ViewFeatures', 'fusion_input', 'sgc_features']

logger = get_logger('features')


@dataclass(frozen=True, eq=False)
class ViewFeatures:
    per_view: List[torch.Tensor]
    order_r: int

    def __len__(self):
        return len(self.per_view)

    def __getitem__(self, idx: int) -> torch.Tensor:
        return self.per_view[idx]


def sgc_features(g: MultiplexGraph, r: int) -> ViewFeatures:
    """X^v = (D^{-1/2} (A_v + I) D^{-1/2})^r X for every view."""
    if r < 0:
        raise ContractError(f'Propagation order must be >= 0, got {r}')
    per_view = []
    with torch.no_grad():
        for idx, view in enumerate(g.views):
            operator = normalize_sym(view.detach())
            propagated = g.features
            for _ in range(r):
                propagated = spmm(operator, propagated)
            per_view.append(propagated)
            logger.debug('View %d propagated %d steps', idx, r)
    return ViewFeatures(per_view, r)


def fusion_input(x: torch.Tensor, vf: ViewFeatures) -> torch.Tensor:
    """Column concatenation [X, X^1, ..., X^V]."""
    for idx, xv in enumerate(vf.per_view):
        if xv.shape[0] != x.shape[0]:
            raise DimensionError(
                f'View {idx} features have {xv.shape[0]} rows, '
                f'expected {x.shape[0]}'
            )
    return torch.cat([x, *vf.per_view], dim=1)

# -*- mode:python; coding:utf-8; -*-

"""Random edge and feature perturbations for robustness experiments."""

import math
from typing import Literal

import numpy as np
import torch

from infomgf.engine.rng import RngStream
from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.sparse import SparseMatrix
from infomgf.shared.exceptions import ContractError
from infomgf.shared.utils.log_utils import get_logger

__all__ = ['perturb_edges', 'perturb_features']

logger = get_logger('evaluation')


def _upper_pairs(view: SparseMatrix):
    rows = view.rows.numpy()
    cols = view.cols.numpy()
    upper = rows < cols
    return rows[upper], cols[upper]


def _delete(view: SparseMatrix, count: int, rng: RngStream) -> SparseMatrix:
    src, dst = _upper_pairs(view)
    keep = np.ones(src.size, dtype=bool)
    keep[rng.numpy.choice(src.size, size=count, replace=False)] = False
    return SparseMatrix.from_edges(view.n_rows, src[keep], dst[keep])


def _sample_non_edges(n: int, existing: set, count: int, rng: RngStream):
    available = n * (n - 1) // 2 - len(existing)
    if count > available // 2:
        # Dense regime: enumerate every free pair
        src, dst = np.triu_indices(n, k=1)
        free = np.array(
            [(i, j) not in existing for i, j in zip(src, dst)], dtype=bool,
        )
        chosen = rng.numpy.choice(np.flatnonzero(free), count, replace=False)
        return src[np.sort(chosen)], dst[np.sort(chosen)]
    added = []
    taken = set(existing)
    while len(added) < count:
        i, j = rng.numpy.integers(0, n, size=2).tolist()
        pair = (min(i, j), max(i, j))
        if i != j and pair not in taken:
            taken.add(pair)
            added.append(pair)
    added.sort()
    return (
        np.array([i for i, _ in added], dtype=np.int64),
        np.array([j for _, j in added], dtype=np.int64),
    )


def _add(view: SparseMatrix, count: int, rng: RngStream) -> SparseMatrix:
    n = view.n_rows
    src, dst = _upper_pairs(view)
    existing = set(zip(src.tolist(), dst.tolist()))
    available = n * (n - 1) // 2 - len(existing)
    if count > available:
        logger.warning(
            'Cannot add %d edges, only %d non-edges left; adding %d',
            count, available, available,
        )
        count = available
    new_src, new_dst = _sample_non_edges(n, existing, count, rng)
    return SparseMatrix.from_edges(
        n, np.concatenate([src, new_src]), np.concatenate([dst, new_dst]),
    )


def perturb_edges(
    g: MultiplexGraph,
    rate: float,
    mode: Literal['add', 'delete'],
    rng: RngStream,
) -> MultiplexGraph:
    """
    Removes or inserts floor(rate * m) undirected edges per view, where m
    is the view's edge count. Deletion stops at the empty graph.
    """
    if rate < 0:
        raise ContractError(f'Perturbation rate must be >= 0, got {rate}')
    if mode not in ('add', 'delete'):
        raise ContractError(f'Unknown edge perturbation mode: {mode}')
    views = []
    for view in g.views:
        m = int(_upper_pairs(view)[0].size)
        count = math.floor(rate * m)
        if count == 0:
            views.append(view)
        elif mode == 'delete':
            views.append(_delete(view, min(count, m), rng))
        else:
            views.append(_add(view, count, rng))
    return g.replace(views=views)


def perturb_features(
    x: torch.Tensor,
    noise_std: float,
    rng: RngStream,
) -> torch.Tensor:
    if noise_std < 0:
        raise ContractError(f'Noise std must be >= 0, got {noise_std}')
    if noise_std == 0:
        return x.clone()
    return x + rng.normal(tuple(x.shape), std=noise_std)

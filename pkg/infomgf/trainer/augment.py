# -*- mode:python; coding:utf-8; -*-

"""Random feature masking and edge dropping."""

import torch

from infomgf.engine.rng import RngStream
from infomgf.graph.sparse import SparseMatrix
from infomgf.shared.exceptions import ContractError

__all__ = ['drop_edges', 'mask_features']


def _check_probability(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise ContractError(f'{name} must lie in [0, 1], got {value}')


def mask_features(x: torch.Tensor, rho: float, rng: RngStream) -> torch.Tensor:
    """Zeroes whole feature columns; each column is masked with prob. rho."""
    _check_probability('rho', rho)
    keep = rng.bernoulli(1.0 - rho, x.shape[1])
    return x * torch.as_tensor(keep, dtype=x.dtype)


def drop_edges(a: SparseMatrix, rho_s: float, rng: RngStream) -> SparseMatrix:
    """
    Keeps every undirected edge independently with probability 1 - rho_s.

    One draw per unordered pair keeps the result symmetric; diagonal
    entries are left alone.
    """
    _check_probability('rho_s', rho_s)
    upper = a.rows < a.cols
    diagonal = a.rows == a.cols
    keep = torch.as_tensor(rng.bernoulli(1.0 - rho_s, int(upper.sum())))
    rows = a.rows[upper][keep]
    cols = a.cols[upper][keep]
    values = a.values[upper][keep]
    return SparseMatrix.from_coo(
        a.n_rows,
        a.n_cols,
        torch.cat([rows, cols, a.rows[diagonal]]),
        torch.cat([cols, rows, a.cols[diagonal]]),
        torch.cat([values, values, a.values[diagonal]]),
    )

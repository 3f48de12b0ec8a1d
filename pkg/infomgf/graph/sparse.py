# -*- mode:python; coding:utf-8; -*-

"""Row-compressed weighted adjacency matrices backed by torch tensors."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import torch

from infomgf.shared.exceptions import DimensionError, GraphInvariantError

__all__ = ['SparseMatrix', 'spmm']


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """
    Weighted sparse matrix in row-major coordinate order.

    Entries are kept sorted by row and, within each row, by strictly
    increasing column, so ``row_offsets``/``col_indices`` form a valid CSR
    view. ``values`` may carry autograd history; the index tensors never do.
    """

    n_rows: int
    n_cols: int
    rows: torch.Tensor
    cols: torch.Tensor
    values: torch.Tensor

    @classmethod
    def from_coo(
        cls,
        n_rows: int,
        n_cols: int,
        rows: torch.Tensor,
        cols: torch.Tensor,
        values: torch.Tensor,
        reduce: str = 'sum',
    ) -> 'SparseMatrix':
        """
        Builds a canonical matrix from unordered triplets.

        Duplicate coordinates are merged by summing (``reduce='sum'``) or
        averaging (``reduce='mean'``) their values; the merge is
        differentiable with respect to ``values``.
        """
        rows = torch.as_tensor(rows, dtype=torch.int64)
        cols = torch.as_tensor(cols, dtype=torch.int64)
        values = torch.as_tensor(values, dtype=torch.float64)
        if not rows.numel():
            return cls.empty(n_rows, n_cols)
        keys = rows * n_cols + cols
        unique, inverse = torch.unique(keys, sorted=True, return_inverse=True)
        merged = values.new_zeros(unique.numel()).index_add(
            0, inverse, values,
        )
        if reduce == 'mean':
            counts = torch.bincount(inverse, minlength=unique.numel())
            merged = merged / counts.to(merged.dtype)
        elif reduce != 'sum':
            raise ValueError(f'Unknown reduce mode: {reduce}')
        return cls(
            n_rows,
            n_cols,
            torch.div(unique, n_cols, rounding_mode='floor'),
            unique % n_cols,
            merged,
        )

    @classmethod
    def empty(cls, n_rows: int, n_cols: int) -> 'SparseMatrix':
        index = torch.zeros(0, dtype=torch.int64)
        return cls(
            n_rows, n_cols, index, index.clone(),
            torch.zeros(0, dtype=torch.float64),
        )

    @classmethod
    def identity(cls, n: int) -> 'SparseMatrix':
        diag = torch.arange(n, dtype=torch.int64)
        return cls(n, n, diag, diag.clone(), torch.ones(n, dtype=torch.float64))

    @classmethod
    def from_dense(cls, dense) -> 'SparseMatrix':
        """Keeps the non-zero entries of a dense matrix (differentiably)."""
        dense = torch.as_tensor(dense, dtype=torch.float64)
        if dense.dim() != 2:
            raise DimensionError(f'Expected a matrix, got shape {dense.shape}')
        rows, cols = torch.nonzero(dense, as_tuple=True)
        return cls(
            dense.shape[0], dense.shape[1], rows, cols, dense[rows, cols],
        )

    @classmethod
    def from_edges(
        cls,
        n: int,
        src: Sequence[int],
        dst: Sequence[int],
        weights: Optional[Sequence[float]] = None,
        symmetric: bool = True,
    ) -> 'SparseMatrix':
        """
        Adjacency from an edge list; with ``symmetric`` every edge is
        mirrored. Repeated edges are averaged.
        """
        src = torch.as_tensor(np.asarray(src, dtype=np.int64))
        dst = torch.as_tensor(np.asarray(dst, dtype=np.int64))
        if weights is None:
            weights = torch.ones(src.numel(), dtype=torch.float64)
        weights = torch.as_tensor(np.asarray(weights, dtype=np.float64))
        if symmetric:
            src, dst = torch.cat([src, dst]), torch.cat([dst, src])
            weights = torch.cat([weights, weights])
        if src.numel() and (
            int(src.max()) >= n or int(dst.max()) >= n
            or int(src.min()) < 0 or int(dst.min()) < 0
        ):
            raise GraphInvariantError(f'Edge endpoint outside [0, {n})')
        return cls.from_coo(n, n, src, dst, weights, reduce='mean')

    @classmethod
    def from_scipy(cls, matrix: sp.spmatrix) -> 'SparseMatrix':
        coo = sp.coo_matrix(matrix)
        return cls.from_coo(
            coo.shape[0],
            coo.shape[1],
            torch.as_tensor(coo.row.astype(np.int64)),
            torch.as_tensor(coo.col.astype(np.int64)),
            torch.as_tensor(coo.data.astype(np.float64)),
        )

    @property
    def shape(self):
        return self.n_rows, self.n_cols

    @property
    def nnz(self) -> int:
        return int(self.values.numel())

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    @property
    def row_offsets(self) -> torch.Tensor:
        counts = torch.bincount(self.rows, minlength=self.n_rows)
        return torch.cat([counts.new_zeros(1), torch.cumsum(counts, 0)])

    @property
    def col_indices(self) -> torch.Tensor:
        return self.cols

    def row_nnz(self) -> torch.Tensor:
        return torch.bincount(self.rows, minlength=self.n_rows)

    def with_values(self, values: torch.Tensor) -> 'SparseMatrix':
        return SparseMatrix(self.n_rows, self.n_cols, self.rows, self.cols,
                            values)

    def detach(self) -> 'SparseMatrix':
        return self.with_values(self.values.detach())

    def prune(self, tol: float = 0.0) -> 'SparseMatrix':
        """Drops entries whose magnitude is not above ``tol``."""
        keep = self.values.abs() > tol
        return SparseMatrix(
            self.n_rows, self.n_cols,
            self.rows[keep], self.cols[keep], self.values[keep],
        )

    def transpose(self) -> 'SparseMatrix':
        return SparseMatrix.from_coo(
            self.n_cols, self.n_rows, self.cols, self.rows, self.values,
        )

    def to_dense(self) -> torch.Tensor:
        dense = self.values.new_zeros(self.n_rows, self.n_cols)
        return dense.index_put((self.rows, self.cols), self.values)

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (
                self.values.detach().cpu().numpy(),
                self.cols.cpu().numpy(),
                self.row_offsets.cpu().numpy(),
            ),
            shape=self.shape,
        )

    def edge_set(self, upper: bool = True) -> set:
        """Coordinates of stored entries, upper triangle only by default."""
        rows = self.rows.tolist()
        cols = self.cols.tolist()
        if upper:
            return {(r, c) for r, c in zip(rows, cols) if r < c}
        return set(zip(rows, cols))

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        if not self.is_square:
            return False
        diff = self.to_scipy() - self.to_scipy().T
        return diff.nnz == 0 or float(abs(diff).max()) <= tol

    def validate(self) -> 'SparseMatrix':
        offsets = self.row_offsets
        if offsets.numel() != self.n_rows + 1 or int(offsets[-1]) != self.nnz:
            raise GraphInvariantError('row_offsets do not cover values')
        if not (self.rows.numel() == self.cols.numel() == self.nnz):
            raise GraphInvariantError('index and value lengths differ')
        if self.nnz:
            if int(self.cols.min()) < 0 or int(self.cols.max()) >= self.n_cols:
                raise GraphInvariantError('column index out of range')
            if int(self.rows.min()) < 0 or int(self.rows.max()) >= self.n_rows:
                raise GraphInvariantError('row index out of range')
            keys = self.rows * self.n_cols + self.cols
            if bool((keys[1:] <= keys[:-1]).any()):
                raise GraphInvariantError(
                    'entries are not strictly increasing in row-major order'
                )
        if not bool(torch.isfinite(self.values).all()):
            raise GraphInvariantError('values contain NaN or Inf')
        return self


def spmm(a: SparseMatrix, x: torch.Tensor) -> torch.Tensor:
    """Sparse-dense product ``a @ x`` with a fixed accumulation order."""
    if a.n_cols != x.shape[0]:
        raise DimensionError(
            f'Cannot multiply {a.n_rows}x{a.n_cols} by '
            f'{x.shape[0]}x{x.shape[1]}'
        )
    out = x.new_zeros(a.n_rows, x.shape[1])
    return out.index_add(0, a.rows, a.values.unsqueeze(1) * x[a.cols])

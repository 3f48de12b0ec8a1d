# -*- mode:python; coding:utf-8; -*-

"""
Post-processing chain applied to every learned adjacency:
similarity -> top-k -> symmetrize/activate -> normalize.
"""

import torch

from infomgf.engine.rng import substream
from infomgf.graph.sparse import SparseMatrix
from infomgf.shared.constants import APPROX_KNN_ROUNDS
from infomgf.shared.exceptions import ContractError, DimensionError
from infomgf.shared.utils.log_utils import get_logger

__all__ = [
    'approx_topk',
    'cosine_similarity',
    'normalize_sym',
    'postprocess',
    'postprocess_sparse',
    'symmetrize_activate',
    'topk_rows',
]

logger = get_logger('graph')


def _require_square(a: SparseMatrix, op_name: str):
    if not a.is_square:
        raise DimensionError(
            f'{op_name} expects a square matrix, got {a.n_rows}x{a.n_cols}'
        )


def normalize_sym(a: SparseMatrix) -> SparseMatrix:
    """
    Symmetric normalization with self-loops, D^{-1/2} (A + I) D^{-1/2}.

    Rows that already store a diagonal entry keep it as their self-loop;
    a unit self-loop is added to every other row. For adjacency matrices
    without a diagonal this is exactly ``A + I``.
    """
    _require_square(a, 'normalize_sym')
    if a.nnz and bool((a.values.detach() < 0).any()):
        raise ContractError('normalize_sym expects non-negative weights')
    has_loop = torch.zeros(a.n_rows, dtype=torch.bool)
    on_diag = (a.rows == a.cols) & (a.values.detach() > 0)
    has_loop[a.rows[on_diag]] = True
    missing = torch.nonzero(~has_loop, as_tuple=True)[0]
    looped = SparseMatrix.from_coo(
        a.n_rows,
        a.n_cols,
        torch.cat([a.rows, missing]),
        torch.cat([a.cols, missing]),
        torch.cat([a.values, a.values.new_ones(missing.numel())]),
    )
    degree = looped.values.new_zeros(a.n_rows).index_add(
        0, looped.rows, looped.values,
    )
    # Self-loops keep every degree positive
    assert bool((degree.detach() > 0).all()), 'zero degree after self-loops'
    inv_sqrt = degree.pow(-0.5)
    return looped.with_values(
        inv_sqrt[looped.rows] * looped.values * inv_sqrt[looped.cols]
    )


def symmetrize_activate(a: SparseMatrix) -> SparseMatrix:
    """(relu(A) + relu(A)^T) / 2 with zero entries dropped."""
    _require_square(a, 'symmetrize_activate')
    activated = torch.relu(a.values) / 2
    merged = SparseMatrix.from_coo(
        a.n_rows,
        a.n_cols,
        torch.cat([a.rows, a.cols]),
        torch.cat([a.cols, a.rows]),
        torch.cat([activated, activated]),
    )
    return merged.prune()


def topk_rows(s: torch.Tensor, k: int) -> SparseMatrix:
    """
    Keeps the ``k`` largest entries of every row of a dense matrix.

    Ties go to the lower column index. Retained values are gathered from
    ``s`` so gradients reach kept entries only.
    """
    if k < 1:
        raise ContractError(f'k must be at least 1, got {k}')
    n_rows, n_cols = s.shape
    k = min(k, n_cols)
    order = torch.sort(
        s.detach(), dim=1, descending=True, stable=True,
    ).indices[:, :k]
    cols = torch.sort(order, dim=1).values
    values = torch.gather(s, 1, cols)
    rows = torch.arange(n_rows, dtype=torch.int64).repeat_interleave(k)
    return SparseMatrix(n_rows, n_cols, rows, cols.reshape(-1),
                        values.reshape(-1))


def cosine_similarity(h: torch.Tensor) -> torch.Tensor:
    """
    Pairwise cosine similarity of the rows of ``h``.

    Rows with zero norm get similarity 0 to everything, themselves
    included.
    """
    norms = torch.linalg.vector_norm(h, dim=1)
    zero_rows = norms == 0
    if bool(zero_rows.any()):
        logger.warning(
            'cosine similarity: %d zero-norm rows, similarities set to 0',
            int(zero_rows.sum()),
        )
    unit = h / torch.where(zero_rows, torch.ones_like(norms), norms)[:, None]
    return unit @ unit.T


def approx_topk(
    h: torch.Tensor,
    k: int,
    batch: int,
    seed: int,
    rounds: int = APPROX_KNN_ROUNDS,
) -> SparseMatrix:
    """
    Approximate cosine kNN by random batching.

    Nodes are shuffled into batches of ``batch``, an exact top-k search
    runs inside each batch, and the results of ``rounds`` independent
    shuffles are merged. Each row keeps at most ``rounds * k`` entries.
    """
    if batch < k:
        raise ContractError(f'batch ({batch}) must not be smaller than k ({k})')
    n = h.shape[0]
    if batch >= n:
        if batch > n:
            logger.warning(
                'kNN batch %d exceeds %d nodes, using exact search',
                batch, n,
            )
        return topk_rows(cosine_similarity(h), k)
    rows, cols, values = [], [], []
    for round_idx in range(rounds):
        perm = torch.as_tensor(
            substream(seed, purpose=f'knn-{round_idx}').numpy.permutation(n)
        )
        for chunk in torch.split(perm, batch):
            # Exact search runs on the chunk in global index order so ties
            # resolve to the lower node id
            chunk = torch.sort(chunk).values
            local = topk_rows(cosine_similarity(h[chunk]), k)
            rows.append(chunk[local.rows])
            cols.append(chunk[local.cols])
            values.append(local.values)
    # The same pair found in both rounds carries the same similarity
    return SparseMatrix.from_coo(
        n, n, torch.cat(rows), torch.cat(cols), torch.cat(values),
        reduce='mean',
    )


def postprocess_sparse(a: SparseMatrix) -> SparseMatrix:
    return normalize_sym(symmetrize_activate(a))


def postprocess(s: torch.Tensor, k: int) -> SparseMatrix:
    """normalize_sym(symmetrize_activate(topk_rows(s, k)))."""
    if s.shape[0] != s.shape[1]:
        raise DimensionError(f'Similarity must be square, got {tuple(s.shape)}')
    return postprocess_sparse(topk_rows(s, k))

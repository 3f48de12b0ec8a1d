# -*- mode:python; coding:utf-8; -*-

"""Graph learners, GCN encoder, critic projector, generator and decoder."""

from typing import Callable, Literal, Optional, Sequence

import torch
from torch import nn
from torch.nn import functional as F

from infomgf.engine.rng import RngStream
from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.ops import (
    approx_topk,
    cosine_similarity,
    postprocess,
    postprocess_sparse,
)
from infomgf.graph.sparse import SparseMatrix, spmm
from infomgf.shared.exceptions import ContractError, DimensionError
from infomgf.shared.models import KnnMode

__all__ = [
    'AttentiveLearner',
    'FeatureDecoder',
    'EdgeGenerator',
    'GCN',
    'Projector',
    'critic_score',
    'decode_features',
    'fused_learner_forward',
    'gcn_forward',
    'generator_edge_weights',
    'gumbel_sigmoid',
    'learn_graph',
    'refine_view',
    'view_learner_forward',
    'xavier_weight',
]

# Keeps logit(delta) finite
_DELTA_EPS = 1e-12

ACTIVATIONS = {'tanh': torch.tanh, 'relu': torch.relu}


def xavier_weight(
    fan_in: int,
    fan_out: int,
    generator: Optional[torch.Generator] = None,
) -> nn.Parameter:
    weight = torch.empty(fan_in, fan_out, dtype=torch.float64)
    nn.init.xavier_uniform_(weight, generator=generator)
    return nn.Parameter(weight)


class MLP(nn.Module):
    """Bias-free two-layer perceptron ``act(x @ W1) @ W2``."""

    def __init__(
        self,
        dims: Sequence[int],
        activation: Callable[[torch.Tensor], torch.Tensor] = torch.relu,
        generator: Optional[torch.Generator] = None,
    ):
        super().__init__()
        if len(dims) != 3:
            raise ContractError(f'Two-layer MLP needs 3 sizes, got {dims}')
        self.w1 = xavier_weight(dims[0], dims[1], generator)
        self.w2 = xavier_weight(dims[1], dims[2], generator)
        self.activation = activation

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.activation(x @ self.w1) @ self.w2


class AttentiveLearner(nn.Module):
    """
    Two-stage attentive graph learner ``act(X * w1) * w2``.

    Both stages are per-feature gates shared by every node, so the
    learner costs O(N * d_in).
    """

    def __init__(
        self,
        d_in: int,
        activation: Literal['tanh', 'relu'] = 'tanh',
    ):
        super().__init__()
        self.w1 = nn.Parameter(torch.ones(d_in, dtype=torch.float64))
        self.w2 = nn.Parameter(torch.ones(d_in, dtype=torch.float64))
        self.activation = activation

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[1] != self.w1.shape[0]:
            raise DimensionError(
                f'Learner expects {self.w1.shape[0]} columns, '
                f'got {x.shape[1]}'
            )
        return ACTIVATIONS[self.activation](x * self.w1) * self.w2


def view_learner_forward(
    xv: torch.Tensor,
    p: AttentiveLearner,
) -> torch.Tensor:
    return p(xv)


def learn_graph(
    h: torch.Tensor,
    k: int,
    knn_mode: Optional[KnnMode] = None,
    seed: int = 0,
) -> SparseMatrix:
    """Sparse, symmetric, normalized kNN graph over the rows of ``h``."""
    if knn_mode is not None and knn_mode.kind == 'approx':
        return postprocess_sparse(approx_topk(h, k, knn_mode.batch, seed))
    return postprocess(cosine_similarity(h), k)


def refine_view(
    xv: torch.Tensor,
    p: AttentiveLearner,
    k: int,
    knn_mode: Optional[KnnMode] = None,
    seed: int = 0,
) -> SparseMatrix:
    return learn_graph(view_learner_forward(xv, p), k, knn_mode, seed)


def fused_learner_forward(
    concat: torch.Tensor,
    p: AttentiveLearner,
    k: int,
    knn_mode: Optional[KnnMode] = None,
    seed: int = 0,
) -> SparseMatrix:
    return learn_graph(p(concat), k, knn_mode, seed)


class GCN(nn.Module):
    """Bias-free GCN; ReLU between layers, nothing after the last one."""

    def __init__(
        self,
        dims: Sequence[int],
        generator: Optional[torch.Generator] = None,
    ):
        super().__init__()
        if len(dims) < 2:
            raise ContractError('GCN needs at least one layer')
        self.layers = nn.ParameterList(
            xavier_weight(d_in, d_out, generator)
            for d_in, d_out in zip(dims[:-1], dims[1:])
        )

    @property
    def dims(self):
        return [self.layers[0].shape[0]] + [w.shape[1] for w in self.layers]

    def forward(self, a: SparseMatrix, x: torch.Tensor) -> torch.Tensor:
        if a.n_cols != x.shape[0] or x.shape[1] != self.layers[0].shape[0]:
            raise DimensionError(
                f'GCN got a {a.n_rows}x{a.n_cols} graph and '
                f'{tuple(x.shape)} features, expects {self.dims[0]} columns'
            )
        h = x
        for idx, weight in enumerate(self.layers):
            h = spmm(a, h @ weight)
            if idx < len(self.layers) - 1:
                h = torch.relu(h)
        return h


def gcn_forward(a: SparseMatrix, x: torch.Tensor, p: GCN) -> torch.Tensor:
    return p(a, x)


class Projector(MLP):
    """Critic projection d -> d_h -> d with ELU."""

    def __init__(self, d: int, d_h: int, generator=None):
        super().__init__((d, d_h, d), activation=F.elu, generator=generator)


def _unit_rows(x: torch.Tensor) -> torch.Tensor:
    norms = torch.linalg.vector_norm(x, dim=-1, keepdim=True)
    return x / torch.where(norms == 0, torch.ones_like(norms), norms)


def critic_score(
    zi_row: torch.Tensor,
    zj_row: torch.Tensor,
    p: Callable[[torch.Tensor], torch.Tensor],
) -> torch.Tensor:
    """cos(p(zi), p(zj)); 0 when either projection has zero norm."""
    if zi_row.shape[-1] != zj_row.shape[-1]:
        raise DimensionError('Critic rows must have equal length')
    pi = _unit_rows(p(zi_row.reshape(1, -1)))
    pj = _unit_rows(p(zj_row.reshape(1, -1)))
    return (pi * pj).sum()


def gumbel_sigmoid(
    theta: torch.Tensor,
    tau: float,
    delta: torch.Tensor,
) -> torch.Tensor:
    """sigmoid((log delta - log(1 - delta) + theta) / tau)."""
    if tau <= 0:
        raise ContractError(f'Gumbel temperature must be positive, got {tau}')
    delta = delta.detach().clamp(_DELTA_EPS, 1 - _DELTA_EPS)
    return torch.sigmoid((torch.logit(delta) + theta) / tau)


class EdgeGenerator(nn.Module):
    """Per-edge keep logits ``MLP([W x_i ; W x_j])`` from raw features."""

    def __init__(self, d_f: int, d_h: int, generator=None):
        super().__init__()
        self.w = xavier_weight(d_f, d_h, generator)
        self.mlp = MLP((2 * d_h, d_h, 1), generator=generator)

    def forward(
        self,
        x: torch.Tensor,
        rows: torch.Tensor,
        cols: torch.Tensor,
    ) -> torch.Tensor:
        hidden = x @ self.w
        pairs = torch.cat([hidden[rows], hidden[cols]], dim=1)
        return self.mlp(pairs).squeeze(1)


def generator_edge_weights(
    g: MultiplexGraph,
    view: int,
    p: EdgeGenerator,
    tau: float,
    rng: RngStream,
) -> SparseMatrix:
    """
    Relaxed keep-weights for the existing edges of one view.

    Support equals the original edge set. Each undirected edge gets one
    Gumbel draw applied to the mean of its two directed logits, and the
    same weight is written to both directions.
    """
    adjacency = g.views[view]
    pair = adjacency.rows <= adjacency.cols
    rows, cols = adjacency.rows[pair], adjacency.cols[pair]
    theta = (p(g.features, rows, cols) + p(g.features, cols, rows)) / 2
    omega = gumbel_sigmoid(theta, tau, rng.uniform((rows.numel(),)))
    off = rows != cols
    return SparseMatrix.from_coo(
        adjacency.n_rows,
        adjacency.n_cols,
        torch.cat([rows, cols[off]]),
        torch.cat([cols, rows[off]]),
        torch.cat([omega, omega[off]]),
    )


class FeatureDecoder(MLP):
    """Reconstructs view features d -> d_h -> d_f."""

    def __init__(self, d: int, d_h: int, d_f: int, generator=None):
        super().__init__((d, d_h, d_f), generator=generator)


def decode_features(z: torch.Tensor, p: FeatureDecoder) -> torch.Tensor:
    return p(z)

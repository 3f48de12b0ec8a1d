# -*- mode:python; coding:utf-8; -*-

"""Contrastive mutual-information bounds and the training objectives."""

from dataclasses import dataclass, fields
from typing import Callable, Dict, Literal, Optional, Sequence, Union

import torch
from torch import nn
from torch.func import functional_call

from infomgf.engine.rng import RngStream
from infomgf.shared.exceptions import ContractError, DimensionError

__all__ = [
    'LossBreakdown',
    'MiEstimate',
    'loss_gen',
    'loss_total',
    'mi_lower',
    'mi_upper',
    'reconstruction_error',
]

Projection = Callable[[torch.Tensor], torch.Tensor]
Scalar = Union[float, torch.Tensor]


@dataclass(frozen=True, eq=False)
class MiEstimate:
    value: torch.Tensor
    per_node: torch.Tensor
    bound_kind: Literal['lower', 'upper']
    tau_c: float


@dataclass(eq=False)
class LossBreakdown:
    l_s: Scalar = 0.0
    l_u: Scalar = 0.0
    l_f: Scalar = 0.0
    total: Scalar = 0.0
    l_gen_recon: Scalar = 0.0
    l_gen_mi: Scalar = 0.0
    l_gen_total: Scalar = 0.0

    def to_floats(self) -> 'LossBreakdown':
        return LossBreakdown(**{
            f.name: float(getattr(self, f.name)) for f in fields(self)
        })

    def merge_gen(self, other: 'LossBreakdown') -> 'LossBreakdown':
        """Copy of ``self`` with the generator terms of ``other``."""
        return LossBreakdown(
            self.l_s, self.l_u, self.l_f, self.total,
            other.l_gen_recon, other.l_gen_mi, other.l_gen_total,
        )

    def as_dict(self) -> Dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


def _unit_rows(x: torch.Tensor) -> torch.Tensor:
    norms = torch.linalg.vector_norm(x, dim=1, keepdim=True)
    return x / torch.where(norms == 0, torch.ones_like(norms), norms)


def _frozen(proj: Projection) -> Projection:
    """Same projection with gradients blocked from its parameters."""
    if not isinstance(proj, nn.Module):
        return proj
    params = {
        name: param.detach() for name, param in proj.named_parameters()
    }
    return lambda z: functional_call(proj, params, (z,))


def _scores(
    zi: torch.Tensor,
    zj: torch.Tensor,
    proj: Projection,
    tau_c: float,
) -> torch.Tensor:
    if zi.shape != zj.shape:
        raise DimensionError(
            f'Representations differ in shape: {tuple(zi.shape)} vs '
            f'{tuple(zj.shape)}'
        )
    if tau_c <= 0:
        raise ContractError(f'tau_c must be positive, got {tau_c}')
    return _unit_rows(proj(zi)) @ _unit_rows(proj(zj)).T / tau_c


def _sample_batch(
    n: int,
    batch: Optional[int],
    rng: Optional[RngStream],
) -> Optional[torch.Tensor]:
    if batch is None:
        return None
    if batch < 2:
        raise ContractError(f'Contrastive batch must be >= 2, got {batch}')
    if batch >= n:
        return None
    if rng is None:
        raise ContractError('Batched negatives need a random stream')
    return torch.as_tensor(
        rng.numpy.choice(n, size=batch, replace=False), dtype=torch.int64,
    )


def mi_lower(
    zi: torch.Tensor,
    zj: torch.Tensor,
    proj: Projection,
    tau_c: float,
    batch: Optional[int] = None,
    rng: Optional[RngStream] = None,
) -> MiEstimate:
    """
    Symmetric InfoNCE lower bound.

    Node m contributes the average over both directions of
    ``log softmax_n(f(z_i^m, z_j^n) / tau_c)`` at the positive n = m.
    With ``batch`` set, anchors and negatives come from one uniformly
    sampled subset of that size.
    """
    index = _sample_batch(zi.shape[0], batch, rng)
    if index is not None:
        zi, zj = zi[index], zj[index]
    scores = _scores(zi, zj, proj, tau_c)
    positives = torch.diagonal(scores)
    forward = positives - torch.logsumexp(scores, dim=1)
    reverse = positives - torch.logsumexp(scores, dim=0)
    per_node = (forward + reverse) / 2
    return MiEstimate(per_node.mean(), per_node, 'lower', tau_c)


def mi_upper(
    zi: torch.Tensor,
    zj: torch.Tensor,
    proj: Projection,
    tau_c: float,
    train_critic: bool = False,
) -> MiEstimate:
    """
    Difference-form upper bound with the plugged critic.

    Node m contributes the positive score minus the mean score against
    all nodes, averaged over both directions. The critic is held fixed
    unless ``train_critic`` is set.
    """
    critic = proj if train_critic else _frozen(proj)
    scores = _scores(zi, zj, critic, tau_c)
    positives = torch.diagonal(scores)
    forward = positives - scores.mean(dim=1)
    reverse = positives - scores.mean(dim=0)
    per_node = (forward + reverse) / 2
    return MiEstimate(per_node.mean(), per_node, 'upper', tau_c)


def loss_total(
    view_reps: Sequence[torch.Tensor],
    aug_reps: Sequence[torch.Tensor],
    fused_rep: torch.Tensor,
    proj: Projection,
    tau_c: float,
    batch: Optional[int] = None,
    rng: Optional[RngStream] = None,
    use_shared: bool = True,
    use_unique: bool = True,
) -> LossBreakdown:
    """
    L = L_s + L_u + L_f over refined-view, augmented-view and fused
    representations. A single view has no pairs, so its L_s is 0.
    """
    n_views = len(view_reps)
    if len(aug_reps) != n_views:
        raise DimensionError('Need one augmented representation per view')

    def lower(zi, zj):
        return mi_lower(zi, zj, proj, tau_c, batch=batch, rng=rng).value

    zero = fused_rep.new_zeros(())
    l_s = zero
    if use_shared and n_views >= 2:
        pair_sum = sum(
            lower(view_reps[i], view_reps[j])
            for i in range(n_views)
            for j in range(i + 1, n_views)
        )
        l_s = -2.0 / (n_views * (n_views - 1)) * pair_sum
    l_u = zero
    if use_unique:
        l_u = -sum(
            lower(z, z_aug) for z, z_aug in zip(view_reps, aug_reps)
        ) / n_views
    l_f = -sum(lower(fused_rep, z) for z in view_reps) / n_views
    return LossBreakdown(l_s=l_s, l_u=l_u, l_f=l_f, total=l_s + l_u + l_f)


def reconstruction_error(
    x: torch.Tensor,
    x_hat: torch.Tensor,
) -> torch.Tensor:
    """Mean of 1 - cos(x_j, x_hat_j); a zero-norm row counts as cosine 0."""
    if x.shape != x_hat.shape:
        raise DimensionError(
            f'Reconstruction shape {tuple(x_hat.shape)} != {tuple(x.shape)}'
        )
    cosine = (_unit_rows(x) * _unit_rows(x_hat)).sum(dim=1)
    return (1 - cosine).mean()


def loss_gen(
    xv: Sequence[torch.Tensor],
    xhat: Sequence[torch.Tensor],
    view_reps: Sequence[torch.Tensor],
    aug_reps: Sequence[torch.Tensor],
    proj_ub: Projection,
    tau_c: float,
    lambda_: float,
    use_recon: bool = True,
) -> LossBreakdown:
    """
    Generator objective: cosine reconstruction of the view features plus
    lambda times the upper bound between refined and augmented views.
    """
    if lambda_ < 0:
        raise ContractError(f'lambda must be non-negative, got {lambda_}')
    n_views = len(xv)
    if not len(xhat) == len(view_reps) == len(aug_reps) == n_views:
        raise DimensionError('Generator loss needs one entry per view')
    zero = aug_reps[0].new_zeros(())
    recon = zero
    if use_recon:
        recon = sum(
            reconstruction_error(x, x_hat) for x, x_hat in zip(xv, xhat)
        ) / n_views
    mi = sum(
        mi_upper(z, z_aug, proj_ub, tau_c).value
        for z, z_aug in zip(view_reps, aug_reps)
    ) / n_views
    return LossBreakdown(
        l_gen_recon=recon,
        l_gen_mi=mi,
        l_gen_total=recon + lambda_ * mi,
    )

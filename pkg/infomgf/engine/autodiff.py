# -*- mode:python; coding:utf-8; -*-

"""
Reverse-mode gradients and Adam updates for named parameters.

Every forward pass of one optimisation step records its own autograd
graph; ``backward`` consumes it and the graph is freed afterwards.
"""

from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

import torch

from infomgf.shared.constants import ADAM_BETAS, ADAM_EPS
from infomgf.shared.exceptions import ContractError, NumericalError

__all__ = [
    'AdamState',
    'NamedParams',
    'adam_step',
    'backward',
    'finite_difference_grads',
    'gradcheck_relative_error',
]

NamedParams = Union[
    Mapping[str, torch.Tensor],
    Iterable[Tuple[str, torch.Tensor]],
]


def _as_dict(params: NamedParams) -> Dict[str, torch.Tensor]:
    return dict(params.items() if isinstance(params, Mapping) else params)


def _check_finite(name: str, tensor: torch.Tensor, what: str):
    if not bool(torch.isfinite(tensor).all()):
        raise NumericalError(f'Non-finite {what} for parameter "{name}"')


def backward(
    loss: torch.Tensor,
    params: Optional[NamedParams] = None,
) -> Dict[str, torch.Tensor]:
    """
    Back-propagates a scalar loss.

    Every parameter in ``params`` ends up holding d(loss)/d(param) in
    ``.grad``; parameters the loss does not reach get an all-zero
    gradient. Returns the gradients by name.
    """
    if loss.numel() != 1:
        raise ContractError(
            f'backward needs a scalar root, got shape {tuple(loss.shape)}'
        )
    named = _as_dict(params or {})
    for param in named.values():
        param.grad = None
    if loss.requires_grad:
        loss.reshape(()).backward()
    grads = {}
    for name, param in named.items():
        if param.grad is None:
            param.grad = torch.zeros_like(param)
        _check_finite(name, param.grad, 'gradient')
        grads[name] = param.grad
    return grads


class AdamState:
    """Adam with bias correction over a fixed set of named parameters."""

    def __init__(
        self,
        params: NamedParams,
        lr: float,
        betas: Tuple[float, float] = ADAM_BETAS,
        eps: float = ADAM_EPS,
    ):
        if lr <= 0:
            raise ContractError(f'Learning rate must be positive, got {lr}')
        self.params = _as_dict(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step = 0
        self.optimizer = torch.optim.Adam(
            list(self.params.values()), lr=lr, betas=betas, eps=eps,
        )

    def _moment(self, key: str) -> Dict[str, Optional[torch.Tensor]]:
        return {
            name: self.optimizer.state.get(param, {}).get(key)
            for name, param in self.params.items()
        }

    @property
    def m(self) -> Dict[str, Optional[torch.Tensor]]:
        return self._moment('exp_avg')

    @property
    def v(self) -> Dict[str, Optional[torch.Tensor]]:
        return self._moment('exp_avg_sq')

    def zero_grad(self):
        self.optimizer.zero_grad(set_to_none=True)

    def state_dict(self) -> dict:
        return {'step': self.step, 'optimizer': self.optimizer.state_dict()}

    def load_state_dict(self, state: dict):
        self.step = state['step']
        self.optimizer.load_state_dict(state['optimizer'])


def adam_step(
    state: AdamState,
    grads: Optional[Mapping[str, torch.Tensor]] = None,
) -> Dict[str, torch.Tensor]:
    """
    Applies one Adam update and returns the parameters.

    ``grads`` overrides the ``.grad`` fields; a parameter without any
    gradient is treated as having a zero gradient.
    """
    for name, param in state.params.items():
        if grads is not None and name in grads:
            param.grad = grads[name].detach().clone()
        if param.grad is None:
            param.grad = torch.zeros_like(param)
        _check_finite(name, param.grad, 'gradient')
    state.optimizer.step()
    state.step += 1
    for name, param in state.params.items():
        _check_finite(name, param.detach(), 'value after Adam step')
    return state.params


@torch.no_grad()
def finite_difference_grads(
    loss_fn: Callable[[], torch.Tensor],
    params: NamedParams,
    h: float = 1e-5,
) -> Dict[str, torch.Tensor]:
    """Central differences of ``loss_fn`` for every parameter entry."""
    grads = {}
    for name, param in _as_dict(params).items():
        grad = torch.zeros_like(param)
        flat = param.data.view(-1)
        for idx in range(flat.numel()):
            original = flat[idx].item()
            flat[idx] = original + h
            plus = float(loss_fn())
            flat[idx] = original - h
            minus = float(loss_fn())
            flat[idx] = original
            grad.view(-1)[idx] = (plus - minus) / (2 * h)
        grads[name] = grad
    return grads


def gradcheck_relative_error(
    loss_fn: Callable[[], torch.Tensor],
    params: NamedParams,
    h: float = 1e-5,
) -> Dict[str, float]:
    """
    Relative error ``|g - g_fd| / max(|g|, |g_fd|)`` (Euclidean norms)
    between analytic and finite-difference gradients, per parameter.
    """
    named = _as_dict(params)
    analytic = {
        name: grad.detach().clone()
        for name, grad in backward(loss_fn(), named).items()
    }
    numeric = finite_difference_grads(loss_fn, named, h=h)
    errors = {}
    for name, grad in analytic.items():
        scale = max(
            float(torch.linalg.vector_norm(grad)),
            float(torch.linalg.vector_norm(numeric[name])),
            1e-12,
        )
        errors[name] = float(
            torch.linalg.vector_norm(grad - numeric[name])
        ) / scale
    return errors

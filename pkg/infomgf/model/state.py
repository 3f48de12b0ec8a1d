# -*- mode:python; coding:utf-8; -*-

"""Container of every trainable parameter of the model."""

from typing import Dict, Iterator, Optional, Tuple

import torch
from torch import nn

from infomgf.engine.rng import substream
from infomgf.model.layers import (
    GCN,
    AttentiveLearner,
    EdgeGenerator,
    FeatureDecoder,
    Projector,
)
from infomgf.shared.utils.file_utils import get_hasher

__all__ = ['ModelState']

MAIN_GROUP = ('view_learners', 'fused_learner', 'gcn', 'projector')
GEN_GROUP = ('generator', 'decoder', 'projector_ub')


class ModelState(nn.Module):
    """
    Per-view learners, fused learner, shared GCN and the critic projector,
    plus generator, decoder and the upper-bound projector when the
    learnable augmentation is enabled.
    """

    def __init__(
        self,
        n_views: int,
        d_f: int,
        d_h: int,
        d: int,
        n_layers: int,
        seed: int = 0,
        with_generator: bool = False,
        learner_activation: str = 'tanh',
    ):
        super().__init__()
        init = substream(seed, purpose='init').torch
        self.view_learners = nn.ModuleList(
            AttentiveLearner(d_f, learner_activation) for _ in range(n_views)
        )
        self.fused_learner = AttentiveLearner(
            d_f * (n_views + 1), learner_activation,
        )
        self.gcn = GCN([d_f] + [d_h] * (n_layers - 1) + [d], generator=init)
        self.projector = Projector(d, d_h, generator=init)
        self.generator: Optional[EdgeGenerator] = None
        self.decoder: Optional[FeatureDecoder] = None
        self.projector_ub: Optional[Projector] = None
        if with_generator:
            self.generator = EdgeGenerator(d_f, d_h, generator=init)
            self.decoder = FeatureDecoder(d, d_h, d_f, generator=init)
            self.projector_ub = Projector(d, d_h, generator=init)

    @property
    def has_generator(self) -> bool:
        return self.generator is not None

    def _group(
        self,
        prefixes: Tuple[str, ...],
    ) -> Iterator[Tuple[str, nn.Parameter]]:
        for name, param in self.named_parameters():
            if name.split('.', 1)[0] in prefixes:
                yield name, param

    def main_parameters(self) -> Dict[str, nn.Parameter]:
        """Learners, GCN and the lower-bound projector."""
        return dict(self._group(MAIN_GROUP))

    def gen_parameters(self) -> Dict[str, nn.Parameter]:
        """Generator, decoder and the upper-bound projector."""
        return dict(self._group(GEN_GROUP))

    def generator_parameters(self) -> Dict[str, nn.Parameter]:
        return dict(self._group(('generator', 'decoder')))

    def critic_parameters(self) -> Dict[str, nn.Parameter]:
        return dict(self._group(('projector_ub',)))

    def group_digest(self, group: str) -> str:
        """Content hash of one parameter group."""
        params = (
            self.main_parameters() if group == 'main'
            else self.gen_parameters()
        )
        hasher = get_hasher('sha256')
        for name in sorted(params):
            hasher.update(name.encode('utf-8'))
            hasher.update(params[name].detach().cpu().numpy().tobytes())
        return hasher.hexdigest()

    def set_group_trainable(self, group: str, trainable: bool):
        params = (
            self.main_parameters() if group == 'main'
            else self.gen_parameters()
        )
        for param in params.values():
            param.requires_grad_(trainable)

    def named_arrays(self) -> Dict[str, torch.Tensor]:
        return {
            name: param.detach() for name, param in self.named_parameters()
        }

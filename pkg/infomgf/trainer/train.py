# -*- mode:python; coding:utf-8; -*-

"""
Epoch loops.

Random augmentation: every epoch refines the views, fuses them, draws
random augmentations and takes one step on L.

Learnable augmentation alternates two steps per epoch. Step 1 keeps the
augmented graphs of the previous epoch fixed and updates learners, GCN
and critic on L. Step 2 keeps the refined graphs fixed, regenerates the
augmented graphs and updates generator and decoder on L_gen.
"""

import time
from dataclasses import dataclass, field
from functools import wraps
from typing import Dict, List, Optional, Tuple

import torch

from infomgf.engine.autodiff import AdamState, adam_step, backward
from infomgf.engine.rng import derive_seed, substream
from infomgf.features import ViewFeatures, fusion_input, sgc_features
from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.ops import normalize_sym
from infomgf.graph.sparse import SparseMatrix
from infomgf.model.layers import (
    decode_features,
    fused_learner_forward,
    gcn_forward,
    generator_edge_weights,
    refine_view,
)
from infomgf.model.state import ModelState
from infomgf.objectives import LossBreakdown, loss_gen, loss_total, mi_lower
from infomgf.shared.constants import (
    CONTRASTIVE_BATCH,
    CONTRASTIVE_FULL_BATCH_LIMIT,
)
from infomgf.shared.exceptions import ContractError, NumericalError
from infomgf.shared.models import TrainConfig
from infomgf.shared.utils.log_utils import get_logger
from infomgf.trainer.augment import drop_edges, mask_features

__all__ = ['Trainer', 'TrainOutput', 'train', 'train_la', 'train_ra']

AugmentedView = Tuple[SparseMatrix, torch.Tensor]


def measure_stage(stage: str):
    def wrapper(func):
        @wraps(func)
        def wrapped(self, *args, **kwargs):
            start = time.perf_counter()
            try:
                return func(self, *args, **kwargs)
            finally:
                record = self.stats.setdefault(
                    stage, {'calls': 0, 'delta': 0.0},
                )
                record['calls'] += 1
                record['delta'] += time.perf_counter() - start

        return wrapped

    return wrapper


@dataclass(eq=False)
class TrainOutput:
    fused_graph: SparseMatrix
    fused_reps: torch.Tensor
    refined_graphs: List[SparseMatrix]
    loss_history: List[LossBreakdown]
    model: ModelState
    stats: Dict[str, Dict[str, float]] = field(default_factory=dict)


class Trainer:
    """
    Owns the precomputed view features, the model and its optimizers for
    one training run over a multiplex graph.
    """

    def __init__(self, g: MultiplexGraph, cfg: TrainConfig):
        self.g = g
        self.cfg = cfg
        self.logger = get_logger('trainer')
        self.stats: Dict[str, Dict[str, float]] = {}
        self.is_learnable = cfg.variant == 'LA'
        # Propagated once, reused by every epoch
        self.view_features: ViewFeatures = sgc_features(g, cfg.r)
        self.fusion_features = fusion_input(g.features, self.view_features)
        self.normalized_views = [normalize_sym(v) for v in g.views]
        self.model = ModelState(
            n_views=g.n_views,
            d_f=g.feature_dim,
            d_h=cfg.d_h,
            d=cfg.d,
            n_layers=cfg.n_layers,
            seed=cfg.seed,
            with_generator=self.is_learnable,
        )
        self.optimizer = AdamState(self.model.main_parameters(), cfg.lr)
        self.gen_optimizer: Optional[AdamState] = None
        self.critic_optimizer: Optional[AdamState] = None
        if self.is_learnable:
            self.gen_optimizer = AdamState(
                self.model.generator_parameters(), cfg.lr_gen,
            )
            self.critic_optimizer = AdamState(
                self.model.critic_parameters(), cfg.lr_gen,
            )
        self.contrastive_batch = cfg.batch_contrastive
        if (
            self.contrastive_batch is None
            and g.n_nodes > CONTRASTIVE_FULL_BATCH_LIMIT
        ):
            self.contrastive_batch = CONTRASTIVE_BATCH
        self.augmented: List[AugmentedView] = []
        self.refined: List[SparseMatrix] = []
        self.loss_history: List[LossBreakdown] = []

    def _knn_seed(self, view: Optional[int], epoch: int) -> int:
        return derive_seed(self.cfg.seed, view, epoch, 'knn')

    @measure_stage('refine')
    def refine(self, epoch: int) -> List[SparseMatrix]:
        if self.cfg.ablation == 'no_refine':
            return list(self.normalized_views)
        return [
            refine_view(
                self.view_features[v],
                learner,
                self.cfg.k,
                self.cfg.knn_mode,
                self._knn_seed(v, epoch),
            )
            for v, learner in enumerate(self.model.view_learners)
        ]

    @measure_stage('fuse')
    def fuse(self, epoch: int) -> SparseMatrix:
        fused = fused_learner_forward(
            self.fusion_features,
            self.model.fused_learner,
            self.cfg.k,
            self.cfg.knn_mode,
            self._knn_seed(None, epoch),
        )
        fused.validate()
        return fused

    def _masked_features(self, view: int, epoch: int, purpose: str):
        if self.cfg.ablation == 'no_aug':
            return self.g.features
        rng = substream(self.cfg.seed, view, epoch, purpose)
        return mask_features(self.g.features, self.cfg.rho, rng)

    @measure_stage('augment')
    def random_augment(self, epoch: int) -> List[AugmentedView]:
        augmented = []
        for v, view in enumerate(self.g.views):
            if self.cfg.ablation == 'no_aug':
                augmented.append((self.normalized_views[v], self.g.features))
                continue
            rng = substream(self.cfg.seed, v, epoch, 'drop')
            dropped = drop_edges(view, self.cfg.rho_s, rng)
            augmented.append((
                normalize_sym(dropped),
                self._masked_features(v, epoch, 'mask'),
            ))
        return augmented

    @measure_stage('generate')
    def generate_augment(self, epoch: int) -> List[AugmentedView]:
        augmented = []
        for v in range(self.g.n_views):
            if self.cfg.ablation == 'no_aug':
                augmented.append((self.normalized_views[v], self.g.features))
                continue
            weights = generator_edge_weights(
                self.g,
                v,
                self.model.generator,
                self.cfg.tau,
                substream(self.cfg.seed, v, epoch, 'gumbel'),
            )
            augmented.append((
                normalize_sym(weights),
                self._masked_features(v, epoch, 'mask'),
            ))
        return augmented

    def _encode(self, a: SparseMatrix, x: torch.Tensor) -> torch.Tensor:
        return gcn_forward(a, x, self.model.gcn)

    def _check_finite(self, epoch: int, breakdown: LossBreakdown):
        values = breakdown.as_dict()
        if not all(torch.isfinite(torch.tensor(list(values.values())))):
            raise NumericalError(
                f'Non-finite loss at epoch {epoch}: {values}'
            )

    @measure_stage('step_main')
    def step_main(
        self,
        epoch: int,
        augmented: List[AugmentedView],
    ) -> LossBreakdown:
        """One update of learners, GCN and critic on L."""
        refined = self.refine(epoch)
        fused = self.fuse(epoch)
        x = self.g.features
        view_reps = [self._encode(a, x) for a in refined]
        aug_reps = [self._encode(a, x_aug) for a, x_aug in augmented]
        fused_rep = self._encode(fused, x)
        breakdown = loss_total(
            view_reps,
            aug_reps,
            fused_rep,
            self.model.projector,
            self.cfg.tau_c,
            batch=self.contrastive_batch,
            rng=substream(self.cfg.seed, None, epoch, 'negatives'),
            use_shared=self.cfg.ablation != 'no_shared',
            use_unique=self.cfg.ablation != 'no_unique',
        )
        self._check_finite(epoch, breakdown)
        backward(breakdown.total, self.optimizer.params)
        adam_step(self.optimizer)
        self.refined = [a.detach() for a in refined]
        return breakdown.to_floats()

    @measure_stage('step_gen')
    def step_gen(self, epoch: int) -> LossBreakdown:
        """One update of critic, generator and decoder on L_gen."""
        self.model.set_group_trainable('main', False)
        try:
            with torch.no_grad():
                view_reps = [
                    self._encode(a, self.g.features) for a in self.refined
                ]
            augmented = self.generate_augment(epoch)
            aug_reps = [self._encode(a, x_aug) for a, x_aug in augmented]
            self._step_critic(epoch, view_reps, aug_reps)
            xhat = [
                decode_features(z_aug, self.model.decoder)
                for z_aug in aug_reps
            ]
            breakdown = loss_gen(
                self.view_features.per_view,
                xhat,
                view_reps,
                aug_reps,
                self.model.projector_ub,
                self.cfg.tau_c,
                self.cfg.lambda_,
                use_recon=self.cfg.ablation != 'no_recon',
            )
            self._check_finite(epoch, breakdown)
            backward(breakdown.l_gen_total, self.gen_optimizer.params)
            adam_step(self.gen_optimizer)
        finally:
            self.model.set_group_trainable('main', True)
        self.augmented = [(a.detach(), x_aug) for a, x_aug in augmented]
        return breakdown.to_floats()

    def _step_critic(self, epoch, view_reps, aug_reps):
        # Ascent on the lower bound so the plugged critic stays near optimal
        rng = substream(self.cfg.seed, None, epoch, 'critic')
        critic_loss = -sum(
            mi_lower(
                z, z_aug.detach(), self.model.projector_ub, self.cfg.tau_c,
                batch=self.contrastive_batch, rng=rng,
            ).value
            for z, z_aug in zip(view_reps, aug_reps)
        ) / len(view_reps)
        backward(critic_loss, self.critic_optimizer.params)
        adam_step(self.critic_optimizer)

    def run_epoch(self, epoch: int) -> LossBreakdown:
        if not self.is_learnable:
            breakdown = self.step_main(epoch, self.random_augment(epoch))
        else:
            if not self.augmented:
                with torch.no_grad():
                    self.augmented = self.generate_augment(0)
            breakdown = self.step_main(epoch, self.augmented)
            breakdown = breakdown.merge_gen(self.step_gen(epoch))
        self.loss_history.append(breakdown)
        self.logger.info(
            'epoch %d/%d: L=%.6f (s=%.6f u=%.6f f=%.6f) '
            'L_gen=%.6f (recon=%.6f mi=%.6f)',
            epoch, self.cfg.epochs, breakdown.total, breakdown.l_s,
            breakdown.l_u, breakdown.l_f, breakdown.l_gen_total,
            breakdown.l_gen_recon, breakdown.l_gen_mi,
        )
        return breakdown

    @torch.no_grad()
    def outputs(self) -> TrainOutput:
        final_epoch = self.cfg.epochs + 1
        refined = [a.detach() for a in self.refine(final_epoch)]
        fused = self.fuse(final_epoch).detach()
        fused_reps = self._encode(fused, self.g.features)
        return TrainOutput(
            fused_graph=fused,
            fused_reps=fused_reps,
            refined_graphs=refined,
            loss_history=list(self.loss_history),
            model=self.model,
            stats=self.stats,
        )

    def fit(self) -> TrainOutput:
        self.logger.info(
            'Training %s (%s) on %d nodes, %d views for %d epochs',
            self.cfg.variant, self.cfg.ablation, self.g.n_nodes,
            self.g.n_views, self.cfg.epochs,
        )
        for epoch in range(1, self.cfg.epochs + 1):
            self.run_epoch(epoch)
        for stage, record in sorted(self.stats.items()):
            self.logger.debug(
                'stage %s: %d calls, %.3fs', stage, record['calls'],
                record['delta'],
            )
        return self.outputs()


def train_ra(g: MultiplexGraph, cfg: TrainConfig) -> TrainOutput:
    if cfg.variant != 'RA':
        raise ContractError('train_ra needs variant RA')
    return Trainer(g, cfg).fit()


def train_la(g: MultiplexGraph, cfg: TrainConfig) -> TrainOutput:
    if cfg.variant != 'LA':
        raise ContractError('train_la needs variant LA')
    return Trainer(g, cfg).fit()


def train(g: MultiplexGraph, cfg: TrainConfig) -> TrainOutput:
    return train_la(g, cfg) if cfg.variant == 'LA' else train_ra(g, cfg)

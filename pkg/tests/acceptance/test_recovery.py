"""
Training runs on the four-block multiplex SBM; every test here trains
for the full preset epoch count and is deselected by default.
"""

import os
from typing import Dict, Sequence

import numpy as np
import pytest
from pytest_check import check

from infomgf.cli.bundle import DatasetBundle
from infomgf.engine.rng import substream
from infomgf.evaluation.clustering import clustering_metrics, kmeans
from infomgf.evaluation.perturb import perturb_edges
from infomgf.evaluation.stats import intra_class_weight_fraction
from infomgf.evaluation.synthetic import gen_sbm
from infomgf.graph.multiplex import MultiplexGraph
from infomgf.shared.models import TrainConfig
from infomgf.trainer import TrainOutput, train

SEEDS = (0, 1, 2, 3, 4)


def make_config(seed: int, **overrides) -> TrainConfig:
    return TrainConfig(preset='acm', d_h=64, seed=seed, **overrides)


def nmi(z, g: MultiplexGraph, seed: int) -> float:
    pred = kmeans(z, g.class_count, restarts=10, seed=seed)
    return clustering_metrics(pred, g.labels, g.class_count).nmi


def mean_nmi(runs: Dict[int, TrainOutput], g: MultiplexGraph) -> float:
    return float(np.mean([
        nmi(out.fused_reps, g, seed) for seed, out in runs.items()
    ]))


def train_seeds(
    g: MultiplexGraph,
    seeds: Sequence[int] = SEEDS,
    **overrides,
) -> Dict[int, TrainOutput]:
    return {seed: train(g, make_config(seed, **overrides)) for seed in seeds}


@pytest.fixture(scope='module')
def sbm(acceptance_sbm_spec) -> MultiplexGraph:
    return gen_sbm(acceptance_sbm_spec)


@pytest.fixture(scope='module')
def ra_runs(sbm) -> Dict[int, TrainOutput]:
    return train_seeds(sbm)


@pytest.fixture(scope='module')
def sbm_deleted(sbm) -> MultiplexGraph:
    return perturb_edges(
        sbm, 0.5, 'delete', substream(0, purpose='perturb-delete'),
    )


@pytest.mark.slow
class TestSyntheticRecovery:
    def test_clustering_quality(self, sbm, ra_runs):
        learned = mean_nmi(ra_runs, sbm)
        raw = float(np.mean([nmi(sbm.features, sbm, s) for s in SEEDS]))
        check.greater_equal(learned, 0.80)
        check.greater_equal(learned - raw, 0.15)

    def test_fused_graph_homophily(self, sbm, ra_runs):
        fused = intra_class_weight_fraction(ra_runs[0].fused_graph, sbm.labels)
        for view in sbm.views:
            baseline = intra_class_weight_fraction(view, sbm.labels)
            check.greater_equal(fused, baseline + 0.05)

    def test_finite_losses(self, ra_runs):
        for out in ra_runs.values():
            assert len(out.loss_history) == 100
            assert all(np.isfinite(b.total) for b in out.loss_history)

    def test_learnable_augmentation(self, sbm, ra_runs):
        la = mean_nmi(train_seeds(sbm, variant='LA'), sbm)
        assert la >= mean_nmi(ra_runs, sbm) - 0.02

    def test_edge_deletion_robustness(self, sbm, sbm_deleted, ra_runs):
        ra_drop = mean_nmi(ra_runs, sbm) - mean_nmi(
            train_seeds(sbm_deleted), sbm,
        )
        plain_drop = mean_nmi(
            train_seeds(sbm, ablation='no_refine'), sbm,
        ) - mean_nmi(train_seeds(sbm_deleted, ablation='no_refine'), sbm)
        assert ra_drop < plain_drop

    def test_bit_identical_rerun(self, sbm, ra_runs):
        again = train(sbm, make_config(0))
        assert again.fused_reps.numpy().tobytes() == (
            ra_runs[0].fused_reps.numpy().tobytes()
        )
        assert nmi(again.fused_reps, sbm, 0) == nmi(
            ra_runs[0].fused_reps, sbm, 0,
        )


@pytest.mark.dataset
@pytest.mark.skipif(
    not os.environ.get('INFOMGF_ACM_BUNDLE'),
    reason='INFOMGF_ACM_BUNDLE is not set',
)
def test_acm_clustering():
    g = DatasetBundle.load(os.environ['INFOMGF_ACM_BUNDLE']).graph
    out = train(g, TrainConfig(preset='acm', seed=0))
    scores = [nmi(out.fused_reps, g, seed) for seed in SEEDS]
    assert float(np.mean(scores)) >= 0.70

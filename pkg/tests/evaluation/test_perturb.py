import logging

import pytest
import torch

from infomgf.engine.rng import seeded_rng
from infomgf.evaluation.perturb import perturb_edges, perturb_features
from infomgf.shared.exceptions import ContractError


def edge_sets(g):
    return [view.edge_set() for view in g.views]


class TestPerturbEdges:
    @pytest.mark.parametrize('mode', ['add', 'delete'])
    def test_zero_rate(self, toy_multiplex, mode):
        out = perturb_edges(toy_multiplex, 0.0, mode, seeded_rng(0))
        assert edge_sets(out) == edge_sets(toy_multiplex)

    def test_delete_everything(self, toy_multiplex):
        out = perturb_edges(toy_multiplex, 1.0, 'delete', seeded_rng(0))
        assert all(view.nnz == 0 for view in out.views)

    def test_delete_count(self, toy_multiplex):
        out = perturb_edges(toy_multiplex, 0.5, 'delete', seeded_rng(1))
        # m = 5 and 4, floor(m / 2) removed
        assert out.edge_counts() == [3, 2]
        for before, after in zip(edge_sets(toy_multiplex), edge_sets(out)):
            assert after <= before

    def test_add_count(self, toy_multiplex):
        out = perturb_edges(toy_multiplex, 0.5, 'add', seeded_rng(2))
        assert out.edge_counts() == [7, 6]
        for before, after in zip(edge_sets(toy_multiplex), edge_sets(out)):
            assert before <= after
        assert all(view.is_symmetric() for view in out.views)
        assert torch.equal(out.features, toy_multiplex.features)

    def test_add_dense_regime(self, toy_multiplex):
        out = perturb_edges(toy_multiplex, 1.0, 'add', seeded_rng(3))
        assert out.edge_counts() == [10, 8]

    def test_add_clamped(self, toy_multiplex, caplog):
        with caplog.at_level(logging.WARNING, logger='infomgf.evaluation'):
            out = perturb_edges(toy_multiplex, 10.0, 'add', seeded_rng(0))
        assert out.edge_counts() == [15, 15]
        assert 'non-edges left' in caplog.text

    @pytest.mark.parametrize(
        'rate, mode',
        [
            pytest.param(-0.1, 'delete', id='negative_rate'),
            pytest.param(0.1, 'rewire', id='unknown_mode'),
        ],
    )
    def test_invalid(self, toy_multiplex, rate, mode):
        with pytest.raises(ContractError):
            perturb_edges(toy_multiplex, rate, mode, seeded_rng(0))

    def test_seeded(self, toy_multiplex):
        first = perturb_edges(toy_multiplex, 0.5, 'delete', seeded_rng(9))
        second = perturb_edges(toy_multiplex, 0.5, 'delete', seeded_rng(9))
        assert edge_sets(first) == edge_sets(second)


class TestPerturbFeatures:
    def test_zero_noise(self):
        x = torch.rand(4, 3, dtype=torch.float64)
        out = perturb_features(x, 0.0, seeded_rng(0))
        assert torch.equal(out, x)
        assert out is not x

    def test_noise_scale(self):
        x = torch.zeros(200, 50, dtype=torch.float64)
        out = perturb_features(x, 0.5, seeded_rng(0))
        assert float(out.std()) == pytest.approx(0.5, abs=0.02)
        assert abs(float(out.mean())) < 0.02

    def test_negative_noise(self):
        with pytest.raises(ContractError):
            perturb_features(torch.zeros(2, 2), -1.0, seeded_rng(0))

from contextlib import nullcontext as does_not_raise

import pydantic
import pytest
import yaml

from infomgf.shared.config_loader import get_config_dict_from_yaml
from infomgf.shared.constants import PRESETS
from infomgf.shared.exceptions import ConfigNotFoundError
from infomgf.shared.models import KnnMode, SbmSpec, SweepSpec, TrainConfig


class TestPresets:
    def test_acm(self):
        cfg = TrainConfig(preset='acm')
        assert (cfg.epochs, cfg.lr, cfg.d_h, cfg.d) == (100, 0.01, 128, 64)
        assert (cfg.k, cfg.r, cfg.n_layers) == (15, 2, 2)
        assert (cfg.rho, cfg.rho_s, cfg.tau_c) == (0.5, 0.5, 0.2)
        assert (cfg.lr_gen, cfg.tau, cfg.lambda_) == (0.001, 1.0, 0.01)

    def test_dblp(self):
        cfg = TrainConfig(preset='dblp')
        assert (cfg.d_h, cfg.d, cfg.k, cfg.lambda_) == (64, 32, 10, 1.0)
        assert cfg.epochs == 100

    def test_overrides_win(self):
        cfg = TrainConfig(preset='yelp', k=7, **{'lambda': 0.5})
        assert cfg.k == 7
        assert cfg.lambda_ == 0.5
        assert cfg.lr == 0.001

    def test_presets_are_frozen(self):
        with pytest.raises(TypeError):
            PRESETS['acm']['k'] = 3

    def test_unknown_preset(self):
        with pytest.raises(pydantic.ValidationError):
            TrainConfig(preset='cora')

    def test_snapshot_round_trip(self):
        cfg = TrainConfig(preset='acm', variant='LA', knn_mode='approx:64')
        snapshot = cfg.snapshot()
        assert snapshot['lambda'] == 0.01
        assert TrainConfig.model_validate(snapshot) == cfg


class TestTrainConfigValidation:
    @pytest.mark.parametrize(
        'overrides, expectation',
        [
            pytest.param({}, does_not_raise(), id='defaults'),
            pytest.param(
                {'rho': 1.5}, pytest.raises(pydantic.ValidationError),
                id='rho_above_one',
            ),
            pytest.param(
                {'tau_c': 0.0}, pytest.raises(pydantic.ValidationError),
                id='zero_temperature',
            ),
            pytest.param(
                {'k': 0}, pytest.raises(pydantic.ValidationError),
                id='zero_k',
            ),
            pytest.param(
                {'ablation': 'no_recon'},
                pytest.raises(pydantic.ValidationError),
                id='no_recon_needs_la',
            ),
            pytest.param(
                {'ablation': 'no_recon', 'variant': 'LA'}, does_not_raise(),
                id='no_recon_la',
            ),
            pytest.param(
                {'unknown': 1}, pytest.raises(pydantic.ValidationError),
                id='extra_field',
            ),
        ],
    )
    def test_fields(self, overrides, expectation):
        with expectation:
            TrainConfig(preset='acm', **overrides)

    def test_custom_preset_needs_values(self):
        assert TrainConfig(preset='custom').k == 15


class TestKnnMode:
    @pytest.mark.parametrize(
        'value, kind, batch',
        [
            pytest.param('exact', 'exact', None, id='exact'),
            pytest.param('approx:128', 'approx', 128, id='approx'),
            pytest.param(
                {'kind': 'approx', 'batch': 8}, 'approx', 8, id='mapping',
            ),
        ],
    )
    def test_parse(self, value, kind, batch):
        mode = KnnMode.model_validate(value)
        assert (mode.kind, mode.batch) == (kind, batch)

    @pytest.mark.parametrize('value', ['approx', 'approx:0', 'nearest'])
    def test_invalid(self, value):
        with pytest.raises(pydantic.ValidationError):
            KnnMode.model_validate(value)


class TestSbmSpec:
    def test_per_view_probabilities(self):
        spec = SbmSpec(
            n=20, blocks=2, views=2, p_in_shared=0.1,
            p_in_unique=[0.1, 0.2], p_out=0.01, feature_dim=4,
        )
        assert spec.unique_probs == [0.1, 0.2]

    @pytest.mark.parametrize(
        'overrides',
        [
            pytest.param({'n': 21}, id='uneven_blocks'),
            pytest.param({'feature_dim': 1}, id='too_few_features'),
            pytest.param({'p_out': 0.5}, id='no_community_signal'),
            pytest.param({'p_in_unique': [0.1]}, id='short_unique_list'),
            pytest.param({'p_in_unique': 1.5}, id='unique_above_one'),
        ],
    )
    def test_invalid(self, overrides):
        fields = {
            'n': 20, 'blocks': 2, 'views': 2, 'p_in_shared': 0.1,
            'p_in_unique': 0.1, 'p_out': 0.01, 'feature_dim': 4,
        }
        fields.update(overrides)
        with pytest.raises(pydantic.ValidationError):
            SbmSpec(**fields)


class TestConfigLoader:
    def test_yaml(self, tmp_path):
        path = tmp_path / 'train.yaml'
        path.write_text(yaml.safe_dump({'preset': 'dblp', 'seed': 4}))
        cfg = get_config_dict_from_yaml(str(path), TrainConfig)
        assert cfg.seed == 4
        assert cfg.k == 10

    def test_json(self, tmp_path):
        path = tmp_path / 'sweep.json'
        path.write_text(
            '{"config": {"preset": "acm"}, "param": "k", "values": [5]}'
        )
        spec = get_config_dict_from_yaml(str(path), SweepSpec)
        assert spec.workers == 1
        assert spec.seeds == [0, 1, 2, 3, 4]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigNotFoundError):
            get_config_dict_from_yaml(str(tmp_path / 'nope.yaml'), TrainConfig)

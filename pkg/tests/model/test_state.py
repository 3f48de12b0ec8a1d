import struct
from pathlib import Path

import pytest
import torch

from infomgf.model.checkpoint import (
    MAGIC,
    load_checkpoint,
    restore_model,
    save_checkpoint,
)
from infomgf.model.state import ModelState
from infomgf.shared.exceptions import CheckpointError


def make_state(**overrides) -> ModelState:
    params = {
        'n_views': 2, 'd_f': 4, 'd_h': 8, 'd': 3, 'n_layers': 2, 'seed': 1,
    }
    params.update(overrides)
    return ModelState(**params)


class TestModelState:
    def test_shapes(self):
        state = make_state(with_generator=True)
        assert state.gcn.dims == [4, 8, 3]
        assert state.fused_learner.w1.shape == (12,)
        assert state.generator.w.shape == (4, 8)
        assert state.decoder.w2.shape == (8, 4)

    def test_groups_are_disjoint(self):
        state = make_state(with_generator=True)
        main = set(state.main_parameters())
        gen = set(state.gen_parameters())
        assert not main & gen
        assert main | gen == {name for name, _ in state.named_parameters()}
        assert set(state.generator_parameters()) | set(
            state.critic_parameters()
        ) == gen

    def test_no_generator_for_random_augmentation(self):
        state = make_state()
        assert not state.has_generator
        assert state.gen_parameters() == {}

    def test_seeded_init(self):
        first = make_state(with_generator=True)
        second = make_state(with_generator=True)
        other = make_state(with_generator=True, seed=2)
        assert first.group_digest('main') == second.group_digest('main')
        assert first.group_digest('gen') == second.group_digest('gen')
        assert first.group_digest('main') != other.group_digest('main')

    def test_learner_init_is_ones(self):
        state = make_state()
        for learner in state.view_learners:
            assert bool((learner.w1 == 1).all())
            assert bool((learner.w2 == 1).all())

    def test_set_group_trainable(self):
        state = make_state(with_generator=True)
        state.set_group_trainable('main', False)
        main = state.main_parameters().values()
        assert not any(p.requires_grad for p in main)
        assert all(p.requires_grad for p in state.gen_parameters().values())


class TestCheckpoint:
    def test_round_trip(self, tmp_path: Path):
        state = make_state(with_generator=True)
        path = str(tmp_path / 'model.ckpt')
        save_checkpoint(state.named_arrays(), path, meta={'epochs': 3})
        arrays, meta = load_checkpoint(path)
        assert meta == {'epochs': 3}
        for name, array in state.named_arrays().items():
            assert torch.equal(arrays[name], array)

    def test_restore_model(self, tmp_path: Path):
        source = make_state(seed=5)
        target = make_state(seed=6)
        path = str(tmp_path / 'model.ckpt')
        save_checkpoint(source.named_arrays(), path)
        restore_model(target, path)
        assert target.group_digest('main') == source.group_digest('main')

    def test_header_layout(self, tmp_path: Path):
        path = tmp_path / 'model.ckpt'
        save_checkpoint({'w': torch.ones(2, 2, dtype=torch.float64)}, str(path))
        raw = path.read_bytes()
        assert raw[:8] == MAGIC
        (header_len,) = struct.unpack('<Q', raw[8:16])
        assert len(raw) == 16 + header_len + 4 * 8

    @pytest.mark.parametrize(
        'corrupt',
        [
            pytest.param(lambda raw: b'NOTACKPT' + raw[8:], id='bad_magic'),
            pytest.param(lambda raw: raw[:-8], id='truncated'),
        ],
    )
    def test_corrupted(self, tmp_path: Path, corrupt):
        path = tmp_path / 'model.ckpt'
        save_checkpoint({'w': torch.ones(2, 2, dtype=torch.float64)}, str(path))
        path.write_bytes(corrupt(path.read_bytes()))
        with pytest.raises(CheckpointError):
            load_checkpoint(str(path))

    def test_restore_mismatch(self, tmp_path: Path):
        path = str(tmp_path / 'model.ckpt')
        save_checkpoint(make_state().named_arrays(), path)
        with pytest.raises(CheckpointError):
            restore_model(make_state(with_generator=True), path)

import json
import os

import numpy as np
import pytest
import torch

from infomgf.cli.bundle import (
    DatasetBundle,
    bundle_hash,
    read_edges,
    read_matrix_bin,
    read_weighted_edges,
    write_weighted_edges,
)
from infomgf.evaluation.classification import SplitSpec
from infomgf.graph.ops import normalize_sym
from infomgf.shared.exceptions import DatasetError


@pytest.fixture
def toy_bundle(tmp_path, toy_multiplex) -> str:
    split = SplitSpec([0, 3], [1, 4], [2, 5])
    return DatasetBundle(
        root=str(tmp_path / 'toy'), graph=toy_multiplex, split=split,
    ).save()


def write_lines(path, *lines):
    with open(path, 'wt') as fd:
        fd.write(''.join(f'{line}\n' for line in lines))
    return str(path)


class TestDatasetBundle:
    def test_round_trip(self, toy_bundle, toy_multiplex):
        loaded = DatasetBundle.load(toy_bundle)
        g = loaded.graph
        for before, after in zip(toy_multiplex.views, g.views):
            assert before.edge_set() == after.edge_set()
        assert torch.allclose(g.features, toy_multiplex.features, atol=1e-6)
        assert g.labels.tolist() == toy_multiplex.labels.tolist()
        assert g.view_names == ['pap', 'psp']
        assert loaded.split == SplitSpec([0, 3], [1, 4], [2, 5])

    def test_meta_file(self, toy_bundle):
        with open(os.path.join(toy_bundle, 'meta.json')) as fd:
            meta = json.load(fd)
        assert meta == {
            'n': 6,
            'v': 2,
            'd_f': 4,
            'class_count': 2,
            'view_names': ['pap', 'psp'],
        }

    def test_edge_file_is_upper_triangle(self, toy_bundle):
        with open(os.path.join(toy_bundle, 'view_1.edges')) as fd:
            assert fd.read() == '0\t1\n0\t2\n3\t4\n3\t5\n'

    def test_hash_tracks_content(self, toy_bundle):
        before = bundle_hash(toy_bundle)
        assert bundle_hash(toy_bundle) == before
        with open(os.path.join(toy_bundle, 'view_0.edges'), 'at') as fd:
            fd.write('0\t5\n')
        assert bundle_hash(toy_bundle) != before

    def test_not_a_bundle(self, tmp_path):
        with pytest.raises(DatasetError, match='not a dataset bundle'):
            DatasetBundle.load(str(tmp_path))

    def test_missing_view(self, toy_bundle):
        os.remove(os.path.join(toy_bundle, 'view_1.edges'))
        with pytest.raises(DatasetError, match='missing'):
            DatasetBundle.load(toy_bundle)

    def test_bad_label(self, toy_bundle):
        write_lines(os.path.join(toy_bundle, 'labels.txt'), 0, 0, 0, 1, 1, 7)
        with pytest.raises(DatasetError, match=r'labels.txt:6:'):
            DatasetBundle.load(toy_bundle)

    def test_overlapping_splits(self, toy_bundle):
        with open(os.path.join(toy_bundle, 'splits.json'), 'wt') as fd:
            json.dump({'train': [0, 1], 'val': [1], 'test': [2]}, fd)
        with pytest.raises(DatasetError, match='overlaps'):
            DatasetBundle.load(toy_bundle)


class TestEdgeFiles:
    @pytest.mark.parametrize(
        'line, message',
        [
            pytest.param('1 2', 'expected', id='no_tab'),
            pytest.param('1\tx', 'non-integer', id='not_a_number'),
            pytest.param('2\t1', 'src < dst', id='lower_triangle'),
            pytest.param('1\t1', 'src < dst', id='self_loop'),
            pytest.param('1\t9', 'src < dst', id='out_of_range'),
        ],
    )
    def test_line_diagnostics(self, tmp_path, line, message):
        path = write_lines(tmp_path / 'view_0.edges', '0\t1', line)
        with pytest.raises(DatasetError, match=message) as exc:
            read_edges(path, 5)
        assert f'{path}:2:' in str(exc.value)

    def test_blank_lines_skipped(self, tmp_path):
        path = write_lines(tmp_path / 'view_0.edges', '0\t1', '', '2\t3')
        src, dst = read_edges(path, 4)
        assert src.tolist() == [0, 2]
        assert dst.tolist() == [1, 3]

    def test_feature_size_mismatch(self, tmp_path):
        path = tmp_path / 'features.bin'
        np.zeros(5, dtype='<f4').tofile(path)
        with pytest.raises(DatasetError, match='expected 2x3'):
            read_matrix_bin(str(path), 2, 3)

    def test_weighted_round_trip(self, tmp_path, path_graph):
        a = normalize_sym(path_graph)
        path = str(tmp_path / 'fused.edges')
        write_weighted_edges(path, a)
        assert torch.equal(read_weighted_edges(path, 3).to_dense(),
                           a.to_dense())

    def test_weighted_lower_triangle(self, tmp_path):
        path = write_lines(tmp_path / 'fused.edges', '1\t0\t0.5')
        with pytest.raises(DatasetError, match='fused.edges:1:'):
            read_weighted_edges(path, 3)

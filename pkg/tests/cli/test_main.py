import csv
import json
import os
from unittest import mock

import numpy as np
import pytest
import yaml

from infomgf.cli.bundle import DatasetBundle
from infomgf.cli.main import build_parser, main
from infomgf.evaluation.stats import unique_relevant_ratio
from infomgf.evaluation.synthetic import gen_sbm
from infomgf.shared.exceptions import NumericalError


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def trained_run(tmp_path, train_config_file, capsys) -> str:
    assert main(['train', '-c', train_config_file]) == 0
    capsys.readouterr()
    return str(tmp_path / 'run' / 'manifest.json')


class TestParser:
    def test_train_needs_a_source(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(['train'])

    def test_repeated_seeds(self):
        args = build_parser().parse_args(
            ['eval', '-m', 'run', '-s', '1', '-s', '2'],
        )
        assert args.seed == [1, 2]
        assert args.task == 'cluster'


class TestExitCodes:
    def test_missing_config(self, tmp_path):
        assert main(['train', '-c', str(tmp_path / 'absent.yaml')]) == 2

    def test_invalid_config(self, tmp_path, caplog):
        path = tmp_path / 'bad.yaml'
        path.write_text(yaml.safe_dump({'preset': 'acm', 'epochs': -1}))
        assert main(['train', '-c', str(path)]) == 2
        assert 'epochs' in caplog.text

    def test_config_without_dataset(self, tmp_path):
        path = tmp_path / 'nodata.yaml'
        path.write_text(yaml.safe_dump({'preset': 'acm', 'epochs': 1}))
        assert main(['train', '-c', str(path)]) == 2

    def test_numerical_failure(self, train_config_file):
        with mock.patch(
            'infomgf.cli.commands.train',
            side_effect=NumericalError('Non-finite loss at epoch 1'),
        ):
            assert main(['train', '-c', train_config_file]) == 3

    def test_bad_thread_count(self, sbm_bundle, monkeypatch, caplog):
        monkeypatch.setenv('INFOMGF_THREADS', 'many')
        assert main(['stats', sbm_bundle]) == 2
        assert 'INFOMGF_THREADS' in caplog.text

    def test_thread_count_applied(self, sbm_bundle, monkeypatch):
        monkeypatch.setenv('INFOMGF_THREADS', '2')
        with mock.patch('infomgf.cli.main.torch.set_num_threads') as limit:
            assert main(['stats', sbm_bundle]) == 0
        limit.assert_called_once_with(2)

    def test_raw_classification(self, trained_run):
        argv = ['eval', '-m', trained_run, '-t', 'classify', '--raw']
        assert main(argv) == 2

    def test_changed_dataset(self, trained_run, sbm_bundle):
        with open(os.path.join(sbm_bundle, 'view_0.edges'), 'at') as fd:
            fd.write('0\t59\n')
        assert main(['eval', '-m', trained_run]) == 2
        assert main(['train', '-m', trained_run]) == 2


class TestEndToEnd:
    def test_train_artifacts(self, trained_run):
        with open(trained_run) as fd:
            manifest = json.load(fd)
        assert manifest['seeds'] == [0]
        outputs = manifest['outputs']
        for key in ('checkpoint', 'fused_graph', 'representations', 'losses'):
            assert os.path.exists(outputs[key])
        # 60 nodes, d = 4, float32
        assert os.path.getsize(outputs['representations']) == 60 * 4 * 4
        with open(outputs['losses']) as fd:
            rows = list(csv.DictReader(fd))
        assert [row['epoch'] for row in rows] == ['1', '2']
        assert manifest['config']['lambda'] == 0.01

    def test_rerun_from_manifest(self, trained_run, tmp_path, capsys):
        rerun = tmp_path / 'rerun'
        assert main(['train', '-m', trained_run, '-o', str(rerun)]) == 0
        capsys.readouterr()
        with open(trained_run) as fd:
            first = json.load(fd)['outputs']['representations']
        second = rerun / 'representations.bin'
        with open(first, 'rb') as fd:
            assert fd.read() == second.read_bytes()

    def test_cluster_eval(self, trained_run, capsys):
        report = run_json(capsys, ['eval', '-m', trained_run])
        assert report['task'] == 'cluster'
        assert report['seeds'] == [0, 1]
        assert set(report['metrics']) == {'acc', 'nmi', 'ari', 'f1'}
        for summary in report['metrics'].values():
            assert -1.0 <= summary['mean'] <= 1.0
            assert len(summary['values']) == 2
        assert os.path.exists(
            os.path.join(os.path.dirname(trained_run), 'eval_cluster.json'),
        )

    def test_repeated_eval_is_identical(self, trained_run, capsys):
        first = run_json(capsys, ['eval', '-m', trained_run])
        report_path = os.path.join(
            os.path.dirname(trained_run), 'eval_cluster.json',
        )
        with open(report_path, 'rb') as fd:
            written = fd.read()
        assert run_json(capsys, ['eval', '-m', trained_run]) == first
        with open(report_path, 'rb') as fd:
            assert fd.read() == written

    def test_raw_cluster_eval(self, trained_run, capsys):
        report = run_json(
            capsys, ['eval', '-m', trained_run, '--raw', '-s', '3'],
        )
        assert report['variant'] == 'raw'
        assert report['seeds'] == [3]

    def test_classify_eval(self, trained_run, capsys):
        report = run_json(
            capsys, ['eval', '-m', trained_run, '-t', 'classify', '-s', '0'],
        )
        assert set(report['metrics']) == {'macro_f1', 'micro_f1'}

    def test_dump(self, trained_run, tmp_path, capsys):
        paths = run_json(capsys, ['dump', '-m', trained_run,
                                  '-o', str(tmp_path / 'plots')])
        adjacency = np.loadtxt(paths[0], delimiter=',')
        correlation = np.loadtxt(paths[1], delimiter=',')
        assert adjacency.shape == correlation.shape == (60, 60)
        assert np.allclose(adjacency, adjacency.T)


class TestDatasetVerbs:
    def test_synth_and_stats(self, tmp_path, capsys, small_sbm_spec):
        spec_path = tmp_path / 'sbm.json'
        spec_path.write_text(small_sbm_spec.model_dump_json())
        out = tmp_path / 'synth'
        assert main(['synth', '-c', str(spec_path), '-o', str(out)]) == 0
        assert capsys.readouterr().out.strip() == str(out)
        assert (out / 'splits.json').exists()
        stats = run_json(capsys, ['stats', str(out)])
        assert stats['n'] == 60
        assert stats['class_count'] == 3
        assert len(stats['weighted_homophily']) == 2
        in_memory = unique_relevant_ratio(gen_sbm(small_sbm_spec))
        loaded = DatasetBundle.load(str(out)).graph
        assert unique_relevant_ratio(loaded) == in_memory
        assert stats['unique_relevant_ratio'] == in_memory

    def test_perturb_delete(self, sbm_bundle, tmp_path, capsys):
        before = run_json(capsys, ['stats', sbm_bundle])['edges']
        out = str(tmp_path / 'perturbed')
        argv = ['perturb', sbm_bundle, '-r', '0.5', '--mode', 'delete',
                '-s', '1', '-o', out]
        assert main(argv) == 0
        capsys.readouterr()
        after = run_json(capsys, ['stats', out])['edges']
        assert after == [m - m // 2 for m in before]
        with open(os.path.join(out, 'perturb_manifest.json')) as fd:
            manifest = json.load(fd)
        assert manifest['mode'] == 'delete'
        assert manifest['rate'] == 0.5

    @pytest.mark.parametrize('mode', ['add', 'delete'])
    def test_zero_rate_keeps_views(self, sbm_bundle, tmp_path, capsys, mode):
        out = str(tmp_path / f'zero-{mode}')
        argv = ['perturb', sbm_bundle, '-r', '0', '--mode', mode, '-o', out]
        assert main(argv) == 0
        capsys.readouterr()
        for name in ('view_0.edges', 'view_1.edges'):
            with open(os.path.join(sbm_bundle, name), 'rb') as fd:
                source = fd.read()
            with open(os.path.join(out, name), 'rb') as fd:
                assert fd.read() == source

    def test_perturb_features(self, sbm_bundle, tmp_path, capsys):
        out = str(tmp_path / 'noisy')
        argv = ['perturb', sbm_bundle, '-r', '0.2', '--mode', 'feature',
                '-o', out]
        assert main(argv) == 0
        capsys.readouterr()
        stats = run_json(capsys, ['stats', out])
        original = run_json(capsys, ['stats', sbm_bundle])
        assert stats['edges'] == original['edges']


class TestSweep:
    def test_inline_sweep(self, tmp_path, train_config_file, capsys):
        with open(train_config_file) as fd:
            config = yaml.safe_load(fd)
        spec_path = tmp_path / 'sweep.yaml'
        spec_path.write_text(yaml.safe_dump({
            'config': config,
            'param': 'k',
            'values': [3, 4],
            'seeds': [0],
            'out_dir': str(tmp_path / 'sweep'),
            'workers': 1,
        }))
        assert main(['sweep', '-c', str(spec_path)]) == 0
        summary_path = capsys.readouterr().out.strip()
        with open(summary_path) as fd:
            records = json.load(fd)
        assert [r['config']['k'] for r in records] == [3, 4]
        assert os.path.exists(tmp_path / 'sweep' / 'k=4' / 'seed=0'
                              / 'manifest.json')

    def test_invalid_grid_point(self, tmp_path, train_config_file):
        with open(train_config_file) as fd:
            config = yaml.safe_load(fd)
        spec_path = tmp_path / 'sweep.yaml'
        spec_path.write_text(yaml.safe_dump({
            'config': config, 'param': 'k', 'values': [0], 'seeds': [0],
            'out_dir': str(tmp_path / 'sweep'),
        }))
        assert main(['sweep', '-c', str(spec_path)]) == 2
        assert not os.path.exists(tmp_path / 'sweep' / 'summary.json')

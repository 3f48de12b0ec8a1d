# -*- mode:python; coding:utf-8; -*-

"""Implementations of the CLI verbs."""

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from filelock import FileLock

from infomgf.cli.bundle import (
    DatasetBundle,
    bundle_hash,
    read_matrix_bin,
    read_weighted_edges,
    write_matrix_bin,
    write_weighted_edges,
)
from infomgf.cli.manifest import (
    MANIFEST_FILE,
    PERTURB_MANIFEST_FILE,
    load_manifest,
    manifest_config,
    save_manifest,
)
from infomgf.engine.rng import substream
from infomgf.evaluation.classification import (
    classify_seeds,
    stratified_split,
)
from infomgf.evaluation.clustering import (
    METRIC_NAMES,
    clustering_metrics,
    kmeans,
)
from infomgf.evaluation.perturb import perturb_edges, perturb_features
from infomgf.evaluation.stats import (
    dataset_stats,
    intra_class_weight_fraction,
    summarize,
)
from infomgf.evaluation.synthetic import gen_sbm
from infomgf.model.checkpoint import save_checkpoint
from infomgf.shared.config_loader import get_config_dict_from_yaml
from infomgf.shared.exceptions import ContractError, DatasetError
from infomgf.shared.models import (
    EvalReport,
    PerturbManifest,
    RunManifest,
    SbmSpec,
    SweepSpec,
    TrainConfig,
)
from infomgf.shared.utils.log_utils import get_logger
from infomgf.shared.utils.path_utils import ensure_dir, get_abspath
from infomgf.trainer import train

__all__ = [
    'cmd_dump',
    'cmd_eval',
    'cmd_perturb',
    'cmd_stats',
    'cmd_sweep',
    'cmd_synth',
    'cmd_train',
    'run_training',
]

logger = get_logger('cli')

CHECKPOINT_FILE = 'model.ckpt'
FUSED_GRAPH_FILE = 'fused_graph.edges'
REPRESENTATIONS_FILE = 'representations.bin'
LOSSES_FILE = 'losses.csv'
SWEEP_SUMMARY_FILE = 'summary.json'
LOSS_COLUMNS = ('l_s', 'l_u', 'l_f', 'total', 'l_gen_recon', 'l_gen_mi')
KMEANS_RESTARTS = 10


def _write_json(path: str, data: Any):
    with open(path, 'wt') as fd:
        json.dump(data, fd, indent=2, sort_keys=True)


def _load_dataset(path: Optional[str]) -> DatasetBundle:
    if not path:
        raise DatasetError('No dataset path given in the config')
    return DatasetBundle.load(path)


def run_training(cfg: TrainConfig) -> str:
    """Trains on ``cfg.dataset``, writes all artifacts, returns the manifest."""
    bundle = _load_dataset(cfg.dataset)
    out_dir = ensure_dir(cfg.out_dir)
    result = train(bundle.graph, cfg)
    outputs = {
        'checkpoint': os.path.join(out_dir, CHECKPOINT_FILE),
        'fused_graph': os.path.join(out_dir, FUSED_GRAPH_FILE),
        'representations': os.path.join(out_dir, REPRESENTATIONS_FILE),
        'losses': os.path.join(out_dir, LOSSES_FILE),
    }
    save_checkpoint(
        result.model.named_arrays(),
        outputs['checkpoint'],
        meta={'config': cfg.snapshot()},
    )
    write_weighted_edges(outputs['fused_graph'], result.fused_graph)
    write_matrix_bin(outputs['representations'], result.fused_reps)
    with open(outputs['losses'], 'wt', newline='') as fd:
        writer = csv.writer(fd)
        writer.writerow(('epoch',) + LOSS_COLUMNS)
        for epoch, breakdown in enumerate(result.loss_history, start=1):
            values = breakdown.as_dict()
            writer.writerow(
                [epoch] + [repr(values[name]) for name in LOSS_COLUMNS]
            )
    manifest = RunManifest(
        config=cfg.snapshot(),
        seeds=[cfg.seed],
        dataset_path=bundle.root,
        dataset_hash=bundle_hash(bundle.root),
        outputs=outputs,
    )
    path = save_manifest(manifest, os.path.join(out_dir, MANIFEST_FILE))
    logger.info('Run written to %s', out_dir)
    return path


def cmd_train(
    config_path: Optional[str] = None,
    manifest_path: Optional[str] = None,
    out: Optional[str] = None,
    seed: Optional[int] = None,
) -> str:
    """
    Trains from a config file, or re-runs the config recorded in a
    manifest against the same dataset content.
    """
    if manifest_path:
        manifest = load_manifest(manifest_path)
        cfg = manifest_config(manifest)
        if bundle_hash(manifest.dataset_path) != manifest.dataset_hash:
            raise DatasetError(
                f'{manifest.dataset_path}: content differs from the manifest'
            )
    elif config_path:
        cfg = get_config_dict_from_yaml(get_abspath(config_path), TrainConfig)
    else:
        raise ContractError('Either a config or a manifest is required')
    updates = {}
    if out:
        updates['out_dir'] = out
    if seed is not None:
        updates['seed'] = seed
    if updates:
        cfg = cfg.model_copy(update=updates)
    return run_training(cfg)


def _cluster_report(z, labels, classes: int, seeds: Sequence[int]):
    values = {name: [] for name in METRIC_NAMES}
    for seed in seeds:
        pred = kmeans(z, classes, restarts=KMEANS_RESTARTS, seed=seed)
        metrics = clustering_metrics(pred, labels, classes).metrics()
        for name in METRIC_NAMES:
            values[name].append(metrics[name])
    return {name: summarize(vals) for name, vals in values.items()}


def cmd_eval(
    manifest_path: str,
    task: str = 'cluster',
    raw: bool = False,
    seeds: Optional[Sequence[int]] = None,
) -> EvalReport:
    manifest = load_manifest(manifest_path)
    cfg = manifest_config(manifest)
    seeds = list(seeds or cfg.eval_seeds)
    bundle = DatasetBundle.load(manifest.dataset_path)
    if bundle_hash(bundle.root) != manifest.dataset_hash:
        raise DatasetError(
            f'{bundle.root}: content differs from the manifest'
        )
    g = bundle.graph
    if not g.has_labels:
        raise ContractError(f'{bundle.root}: evaluation needs labels')
    if task == 'cluster':
        if raw:
            z = g.features
        else:
            z = read_matrix_bin(
                manifest.outputs['representations'], g.n_nodes, cfg.d,
            )
        metrics = _cluster_report(z, g.labels, g.class_count, seeds)
    elif task == 'classify':
        if raw:
            raise ContractError('--raw is only supported for clustering')
        if bundle.split is None:
            raise ContractError(f'{bundle.root}: classification needs splits')
        fused = read_weighted_edges(manifest.outputs['fused_graph'], g.n_nodes)
        metrics = classify_seeds(
            fused, g.features, g.labels, bundle.split, seeds, d_h=cfg.d_h,
        )
    else:
        raise ContractError(f'Unknown evaluation task: {task}')
    report = EvalReport(
        task=task,
        dataset=bundle.root,
        variant='raw' if raw else cfg.variant,
        seeds=seeds,
        metrics=metrics,
    )
    suffix = '_raw' if raw else ''
    out_dir = os.path.dirname(get_abspath(manifest.outputs['losses']))
    _write_json(
        os.path.join(out_dir, f'eval_{task}{suffix}.json'),
        report.model_dump(mode='json'),
    )
    return report


def cmd_synth(spec_path: str, out_dir: str) -> str:
    spec = get_config_dict_from_yaml(get_abspath(spec_path), SbmSpec)
    g = gen_sbm(spec)
    split = stratified_split(g.labels, seed=spec.seed)
    root = DatasetBundle(root=out_dir, graph=g, split=split).save()
    logger.info(
        'Synthetic bundle with %d nodes and edges %s written to %s',
        g.n_nodes, g.edge_counts(), root,
    )
    return root


def cmd_perturb(
    bundle_path: str,
    rate: float,
    mode: str,
    seed: int,
    out_dir: str,
) -> str:
    """``mode='feature'`` adds Gaussian noise with std ``rate``."""
    bundle = DatasetBundle.load(bundle_path)
    rng = substream(seed, purpose=f'perturb-{mode}')
    if mode == 'feature':
        graph = bundle.graph.replace(
            features=perturb_features(bundle.graph.features, rate, rng),
        )
    else:
        graph = perturb_edges(bundle.graph, rate, mode, rng)
    root = DatasetBundle(root=out_dir, graph=graph, split=bundle.split).save()
    save_manifest(
        PerturbManifest(
            source_path=bundle.root,
            source_hash=bundle_hash(bundle.root),
            mode=mode,
            rate=rate,
            seed=seed,
        ),
        os.path.join(root, PERTURB_MANIFEST_FILE),
    )
    return root


def cmd_stats(bundle_path: str) -> Dict[str, Any]:
    g = DatasetBundle.load(bundle_path).graph
    stats = dataset_stats(g)
    if g.has_labels:
        stats['weighted_homophily'] = [
            intra_class_weight_fraction(view, g.labels) for view in g.views
        ]
    return stats


def _sweep_job(config: Dict[str, Any], task: str, summary_path: str):
    cfg = TrainConfig.model_validate(config)
    manifest_path = run_training(cfg)
    report = cmd_eval(manifest_path, task=task)
    record = {
        'config': cfg.snapshot(),
        'manifest': manifest_path,
        'metrics': {
            name: summary.mean for name, summary in report.metrics.items()
        },
    }
    with FileLock(f'{summary_path}.lock'):
        records = []
        if os.path.exists(summary_path):
            with open(summary_path, 'rt') as fd:
                records = json.load(fd)
        records.append(record)
        _write_json(summary_path, records)
    return record


def cmd_sweep(sweep_path: str) -> str:
    """
    Trains and evaluates every (value, seed) pair of a one-parameter grid.
    Each job writes its own run directory; the shared summary is appended
    under a file lock.
    """
    spec = get_config_dict_from_yaml(get_abspath(sweep_path), SweepSpec)
    out_dir = ensure_dir(spec.out_dir)
    summary_path = os.path.join(out_dir, SWEEP_SUMMARY_FILE)
    jobs = []
    for value in spec.values:
        for seed in spec.seeds:
            config = dict(spec.config)
            config.update({
                spec.param: value,
                'seed': seed,
                'out_dir': os.path.join(
                    out_dir, f'{spec.param}={value}', f'seed={seed}',
                ),
            })
            # Invalid grid points fail before any job starts
            TrainConfig.model_validate(config)
            jobs.append(config)
    if spec.workers == 1:
        for config in jobs:
            _sweep_job(config, spec.task, summary_path)
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as executor:
            futures = [
                executor.submit(_sweep_job, config, spec.task, summary_path)
                for config in jobs
            ]
            for future in futures:
                future.result()
    logger.info('Sweep of %d runs summarized in %s', len(jobs), summary_path)
    return summary_path


def _label_order(labels: Optional[np.ndarray], n: int) -> np.ndarray:
    if labels is None:
        return np.arange(n)
    return np.argsort(labels, kind='stable')


def cmd_dump(manifest_path: str, out_dir: str) -> List[str]:
    """Dense fused adjacency and representation correlation as CSV."""
    manifest = load_manifest(manifest_path)
    cfg = manifest_config(manifest)
    g = DatasetBundle.load(manifest.dataset_path).graph
    order = _label_order(g.labels, g.n_nodes)
    fused = read_weighted_edges(manifest.outputs['fused_graph'], g.n_nodes)
    z = read_matrix_bin(
        manifest.outputs['representations'], g.n_nodes, cfg.d,
    ).numpy()
    dense = fused.to_dense().numpy()[np.ix_(order, order)]
    correlation = np.corrcoef(z[order])
    out_dir = ensure_dir(out_dir)
    paths = [
        os.path.join(out_dir, 'fused_adjacency.csv'),
        os.path.join(out_dir, 'representation_correlation.csv'),
    ]
    for path, matrix in zip(paths, (dense, correlation)):
        np.savetxt(path, matrix, delimiter=',', fmt='%.10g')
    return paths

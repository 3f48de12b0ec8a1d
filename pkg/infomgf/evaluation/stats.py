# -*- mode:python; coding:utf-8; -*-

"""Dataset statistics and multi-seed aggregation."""

from typing import Any, Dict, List, Sequence

import numpy as np

from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.sparse import SparseMatrix
from infomgf.shared.exceptions import ContractError
from infomgf.shared.models import MetricSummary

__all__ = [
    'dataset_stats',
    'homophily',
    'intra_class_weight_fraction',
    'summarize',
    'unique_relevant_ratio',
]


def summarize(values: Sequence[float]) -> MetricSummary:
    values = [float(v) for v in values]
    if not values:
        raise ContractError('Nothing to summarize')
    return MetricSummary(
        mean=float(np.mean(values)),
        std=float(np.std(values)),
        values=values,
    )


def _edge_keys(a: SparseMatrix) -> np.ndarray:
    rows = a.rows.numpy()
    cols = a.cols.numpy()
    upper = rows < cols
    return rows[upper] * a.n_cols + cols[upper]


def _require_labels(labels) -> np.ndarray:
    if labels is None:
        raise ContractError('This statistic needs node labels')
    return np.asarray(labels, dtype=np.int64)


def unique_relevant_ratio(g: MultiplexGraph) -> List[float]:
    """
    Per view: same-class edges found in no other view, divided by all
    same-class edges of the view. A view without same-class edges has
    ratio 0.
    """
    labels = _require_labels(g.labels)
    keys = [_edge_keys(view) for view in g.views]
    ratios = []
    for idx, own in enumerate(keys):
        relevant = own[labels[own // g.n_nodes] == labels[own % g.n_nodes]]
        if relevant.size == 0:
            ratios.append(0.0)
            continue
        others = [k for j, k in enumerate(keys) if j != idx]
        if others:
            unique = ~np.isin(relevant, np.concatenate(others))
        else:
            unique = np.ones(relevant.size, dtype=bool)
        ratios.append(float(unique.sum()) / relevant.size)
    return ratios


def homophily(a: SparseMatrix, labels) -> float:
    """Fraction of undirected edges whose endpoints share a class."""
    labels = _require_labels(labels)
    keys = _edge_keys(a)
    if keys.size == 0:
        return 0.0
    same = labels[keys // a.n_cols] == labels[keys % a.n_cols]
    return float(same.mean())


def intra_class_weight_fraction(a: SparseMatrix, labels) -> float:
    """Share of off-diagonal edge weight that lies between same-class nodes."""
    labels = _require_labels(labels)
    rows = a.rows.numpy()
    cols = a.cols.numpy()
    weights = a.values.detach().numpy()
    off_diag = rows != cols
    total = float(weights[off_diag].sum())
    if total == 0:
        return 0.0
    same = off_diag & (labels[rows] == labels[cols])
    return float(weights[same].sum()) / total


def dataset_stats(g: MultiplexGraph) -> Dict[str, Any]:
    stats = {
        'n': g.n_nodes,
        'v': g.n_views,
        'd_f': g.feature_dim,
        'view_names': list(g.view_names),
        'edges': g.edge_counts(),
    }
    if g.has_labels:
        stats['class_count'] = g.class_count
        stats['homophily'] = [homophily(v, g.labels) for v in g.views]
        stats['unique_relevant_ratio'] = unique_relevant_ratio(g)
    return stats

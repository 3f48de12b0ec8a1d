# -*- mode:python; coding:utf-8; -*-

"""K-means on node representations and clustering metrics."""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import torch
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans
from sklearn.metrics import (
    adjusted_rand_score,
    f1_score,
    normalized_mutual_info_score,
)

from infomgf.shared.constants import KMEANS_MAX_ITER, KMEANS_TOL
from infomgf.shared.exceptions import ContractError

__all__ = [
    'ClusterReport',
    'cluster_accuracy_mapping',
    'clustering_metrics',
    'kmeans',
    'kmeans_inertia',
]

METRIC_NAMES = ('acc', 'nmi', 'ari', 'f1')


@dataclass(frozen=True)
class ClusterReport:
    acc: float
    nmi: float
    ari: float
    f1: float
    assignment: List[int]

    def metrics(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _as_numpy(z) -> np.ndarray:
    if isinstance(z, torch.Tensor):
        return z.detach().cpu().numpy()
    return np.asarray(z, dtype=np.float64)


def kmeans(z, classes: int, restarts: int = 10, seed: int = 0) -> List[int]:
    """
    Best-inertia Lloyd clustering over ``restarts`` k-means++ seedings.
    Empty clusters are re-seeded from the points farthest from their
    centres.
    """
    if classes < 2:
        raise ContractError(f'K-means needs at least 2 classes, got {classes}')
    model = KMeans(
        n_clusters=classes,
        init='k-means++',
        n_init=restarts,
        max_iter=KMEANS_MAX_ITER,
        tol=KMEANS_TOL,
        random_state=seed,
        algorithm='lloyd',
    )
    return model.fit_predict(_as_numpy(z)).tolist()


def kmeans_inertia(z, assignment: Sequence[int]) -> float:
    """Sum of squared distances of points to their cluster means."""
    points = _as_numpy(z)
    labels = np.asarray(assignment)
    inertia = 0.0
    for label in np.unique(labels):
        members = points[labels == label]
        inertia += float(((members - members.mean(axis=0)) ** 2).sum())
    return inertia


def cluster_accuracy_mapping(pred, truth) -> dict:
    """Optimal one-to-one cluster -> class assignment (Hungarian)."""
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    size = int(max(pred.max(), truth.max())) + 1
    contingency = np.zeros((size, size), dtype=np.int64)
    np.add.at(contingency, (pred, truth), 1)
    rows, cols = linear_sum_assignment(contingency.max() - contingency)
    return dict(zip(rows.tolist(), cols.tolist()))


def clustering_metrics(pred, truth, classes: int) -> ClusterReport:
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape:
        raise ContractError(
            f'Prediction has {pred.size} entries, truth has {truth.size}'
        )
    mapping = cluster_accuracy_mapping(pred, truth)
    matched = np.array([mapping[p] for p in pred], dtype=np.int64)
    if np.unique(truth).size < 2:
        nmi = 0.0
    else:
        nmi = normalized_mutual_info_score(
            truth, pred, average_method='arithmetic',
        )
    return ClusterReport(
        acc=float((matched == truth).mean()),
        nmi=float(nmi),
        ari=float(adjusted_rand_score(truth, pred)),
        f1=float(f1_score(
            truth, matched, labels=np.arange(classes), average='macro',
            zero_division=0,
        )),
        assignment=pred.tolist(),
    )

# -*- mode:python; coding:utf-8; -*-

"""Multiplex stochastic block model with shared and view-unique edges."""

import numpy as np
import torch

from infomgf.engine.rng import substream
from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.sparse import SparseMatrix
from infomgf.shared.models import SbmSpec

__all__ = ['gen_sbm']


def gen_sbm(spec: SbmSpec) -> MultiplexGraph:
    """
    Every view is the union of one intra-block edge set drawn once for all
    views, an intra-block set drawn independently per view and per-view
    inter-block noise. Features are block indicators plus Gaussian noise.
    """
    block_size = spec.n // spec.blocks
    labels = np.arange(spec.n, dtype=np.int64) // block_size
    src, dst = np.triu_indices(spec.n, k=1)
    same_block = labels[src] == labels[dst]

    shared_rng = substream(spec.seed, purpose='sbm-shared')
    shared = same_block & shared_rng.bernoulli(spec.p_in_shared, src.size)

    views = []
    for v, p_unique in enumerate(spec.unique_probs):
        unique = same_block & substream(
            spec.seed, view=v, purpose='sbm-unique',
        ).bernoulli(p_unique, src.size)
        inter = ~same_block & substream(
            spec.seed, view=v, purpose='sbm-inter',
        ).bernoulli(spec.p_out, src.size)
        edges = shared | unique | inter
        views.append(SparseMatrix.from_edges(spec.n, src[edges], dst[edges]))

    features = torch.zeros(spec.n, spec.feature_dim, dtype=torch.float64)
    features[torch.arange(spec.n), torch.as_tensor(labels)] = 1.0
    if spec.feature_noise > 0:
        noise_rng = substream(spec.seed, purpose='sbm-features')
        features += noise_rng.normal(
            (spec.n, spec.feature_dim), std=spec.feature_noise,
        )
    return MultiplexGraph(
        views=views,
        features=features,
        labels=labels,
        class_count=spec.blocks,
        view_names=[f'sbm_{v}' for v in range(spec.views)],
    )

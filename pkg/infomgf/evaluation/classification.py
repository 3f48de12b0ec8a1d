# -*- mode:python; coding:utf-8; -*-

"""Node classification with a fresh GCN trained on a learned graph."""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import torch
from sklearn.metrics import f1_score

from infomgf.engine.autodiff import AdamState, adam_step, backward
from infomgf.engine.rng import substream
from infomgf.evaluation.stats import summarize
from infomgf.graph.sparse import SparseMatrix
from infomgf.model.layers import GCN
from infomgf.shared.constants import CLASSIFY_MAX_EPOCHS, CLASSIFY_PATIENCE
from infomgf.shared.exceptions import ContractError
from infomgf.shared.models import MetricSummary

__all__ = [
    'SplitSpec',
    'classify_on_graph',
    'classify_seeds',
    'stratified_split',
]

CLASSIFY_LR = 0.01
CLASSIFY_WEIGHT_DECAY = 5e-4


@dataclass(frozen=True)
class SplitSpec:
    train: List[int]
    val: List[int]
    test: List[int]

    def validate(self, n: int):
        parts = {'train': self.train, 'val': self.val, 'test': self.test}
        for name, idx in parts.items():
            if not idx:
                raise ContractError(f'The {name} split is empty')
            if min(idx) < 0 or max(idx) >= n:
                raise ContractError(
                    f'The {name} split has indices outside [0, {n})'
                )
        seen = set()
        for name, idx in parts.items():
            if seen.intersection(idx) or len(set(idx)) != len(idx):
                raise ContractError(f'The {name} split overlaps another one')
            seen.update(idx)

    @classmethod
    def from_dict(cls, data: Dict[str, Sequence[int]]) -> 'SplitSpec':
        return cls(*(
            [int(i) for i in data.get(name, [])]
            for name in ('train', 'val', 'test')
        ))

    def as_dict(self) -> Dict[str, List[int]]:
        return {'train': self.train, 'val': self.val, 'test': self.test}


def stratified_split(
    labels,
    train_frac: float = 0.2,
    val_frac: float = 0.2,
    seed: int = 0,
) -> SplitSpec:
    """Per-class random split; the rest of every class goes to test."""
    labels = np.asarray(labels, dtype=np.int64)
    rng = substream(seed, purpose='split').numpy
    train, val, test = [], [], []
    for label in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == label))
        n_train = max(1, int(train_frac * members.size))
        n_val = max(1, int(val_frac * members.size))
        train.extend(members[:n_train].tolist())
        val.extend(members[n_train:n_train + n_val].tolist())
        test.extend(members[n_train + n_val:].tolist())
    return SplitSpec(sorted(train), sorted(val), sorted(test))


def _f1(logits: torch.Tensor, labels: np.ndarray, average: str) -> float:
    pred = logits.argmax(dim=1).numpy()
    return float(f1_score(labels, pred, average=average, zero_division=0))


def classify_on_graph(
    a: SparseMatrix,
    x: torch.Tensor,
    labels,
    split: SplitSpec,
    seed: int,
    d_h: int = 64,
) -> Tuple[float, float]:
    """
    Trains a two-layer GCN on the (already normalized) graph ``a`` and
    returns test (macro-F1, micro-F1) of the epoch with the best
    validation macro-F1.
    """
    labels = np.asarray(labels, dtype=np.int64)
    split.validate(x.shape[0])
    classes = int(labels.max()) + 1
    generator = substream(seed, purpose='classify-init').torch
    model = GCN([x.shape[1], d_h, classes], generator=generator)
    optimizer = AdamState(dict(model.named_parameters()), CLASSIFY_LR)
    target = torch.as_tensor(labels)
    train_idx = torch.as_tensor(split.train)
    best_f1, best_params, waited = -1.0, None, 0
    for _ in range(CLASSIFY_MAX_EPOCHS):
        logits = model(a, x)
        loss = torch.nn.functional.cross_entropy(
            logits[train_idx], target[train_idx],
        )
        decay = sum((w ** 2).sum() for w in model.parameters())
        backward(loss + 0.5 * CLASSIFY_WEIGHT_DECAY * decay, optimizer.params)
        adam_step(optimizer)
        with torch.no_grad():
            val_f1 = _f1(model(a, x)[split.val], labels[split.val], 'macro')
        if val_f1 > best_f1:
            best_f1, waited = val_f1, 0
            best_params = {
                name: p.detach().clone()
                for name, p in model.named_parameters()
            }
        else:
            waited += 1
            if waited >= CLASSIFY_PATIENCE:
                break
    with torch.no_grad():
        for name, param in model.named_parameters():
            param.copy_(best_params[name])
        logits = model(a, x)[split.test]
    test_labels = labels[split.test]
    return _f1(logits, test_labels, 'macro'), _f1(logits, test_labels, 'micro')


def classify_seeds(
    a: SparseMatrix,
    x: torch.Tensor,
    labels,
    split: SplitSpec,
    seeds: Sequence[int],
    d_h: int = 64,
) -> Dict[str, MetricSummary]:
    scores = [classify_on_graph(a, x, labels, split, s, d_h) for s in seeds]
    return {
        'macro_f1': summarize([macro for macro, _ in scores]),
        'micro_f1': summarize([micro for _, micro in scores]),
    }

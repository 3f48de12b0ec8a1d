# -*- mode:python; coding:utf-8; -*-

"""Seeded random streams with purpose-separated substreams."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import torch

from infomgf.shared.utils.file_utils import hash_parts

__all__ = ['RngStream', 'derive_seed', 'seeded_rng', 'substream']

_SEED_MASK = (1 << 63) - 1


@dataclass(frozen=True, eq=False)
class RngStream:
    """Paired numpy and torch generators seeded from one integer."""

    seed: int
    numpy: np.random.Generator
    torch: torch.Generator

    def uniform(self, shape: Tuple[int, ...]) -> torch.Tensor:
        return torch.rand(shape, generator=self.torch, dtype=torch.float64)

    def normal(self, shape: Tuple[int, ...], std: float = 1.0) -> torch.Tensor:
        return std * torch.randn(
            shape, generator=self.torch, dtype=torch.float64,
        )

    def bernoulli(self, p: float, size) -> np.ndarray:
        """Boolean draws that are True with probability ``p``."""
        return self.numpy.random(size) < p


def derive_seed(seed: int, *keys) -> int:
    return int.from_bytes(hash_parts(seed, *keys)[:8], 'little') & _SEED_MASK


def seeded_rng(seed: int) -> RngStream:
    generator = torch.Generator()
    generator.manual_seed(seed)
    return RngStream(seed, np.random.default_rng(seed), generator)


def substream(
    seed: int,
    view: Optional[int] = None,
    epoch: Optional[int] = None,
    purpose: str = '',
) -> RngStream:
    """Independent stream keyed by (seed, view, epoch, purpose)."""
    return seeded_rng(derive_seed(seed, view, epoch, purpose))

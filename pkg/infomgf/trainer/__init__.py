"""Training loops for the random and learnable augmentation variants."""

from infomgf.trainer.train import (
    Trainer,
    TrainOutput,
    train,
    train_la,
    train_ra,
)

__all__ = ['Trainer', 'TrainOutput', 'train', 'train_la', 'train_ra']

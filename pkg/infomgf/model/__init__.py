"""Trainable components and checkpoints."""

from infomgf.model.state import ModelState

__all__ = ['ModelState']

"""Sparse graph representations and the post-processing chain."""

from infomgf.graph.multiplex import MultiplexGraph
from infomgf.graph.sparse import SparseMatrix

__all__ = ['MultiplexGraph', 'SparseMatrix']

# -*- mode:python; coding:utf-8; -*-

"""Unsupervised multiplex graph structure learning and fusion."""

__version__ = '0.3.0'

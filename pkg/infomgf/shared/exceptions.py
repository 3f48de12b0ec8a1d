# -*- mode:python; coding:utf-8; -*-

"""Common error classes."""

__all__ = [
    'InfoMGFBaseError',
    'CheckpointError',
    'ConfigNotFoundError',
    'ContractError',
    'DatasetError',
    'DimensionError',
    'GraphInvariantError',
    'NumericalError',
]


class InfoMGFBaseError(Exception):
    """Base error of the package."""


class ConfigNotFoundError(InfoMGFBaseError, FileNotFoundError):
    """Error when configuration file cannot be found."""


class DimensionError(InfoMGFBaseError, ValueError):
    """Operands have incompatible shapes."""


class ContractError(InfoMGFBaseError, ValueError):
    """A precondition of an operation is violated."""


class GraphInvariantError(InfoMGFBaseError):
    """Sparse matrix or multiplex graph invariants do not hold."""


class NumericalError(InfoMGFBaseError, ArithmeticError):
    """NaN or infinite value in a loss or gradient."""


class DatasetError(InfoMGFBaseError):
    """Dataset bundle is missing files or is inconsistent."""


class CheckpointError(InfoMGFBaseError):
    """Model checkpoint cannot be read or does not match the model."""

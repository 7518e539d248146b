"""Grover's search with imperfect Hadamard gates, its stochastic two-level
model, closed-form decay predictions, and parameter fitting."""

from .errors import ConfigError, DataError, InvalidArgumentError

__version__ = "0.1.0"

__all__ = ["ConfigError", "DataError", "InvalidArgumentError", "__version__"]

"""Stochastic Feynman-Kitaev clocks for open two-level dynamics."""

from __future__ import annotations

from . import clock, linalg, lindblad_ref, qcore, sse
from .errors import ConfigError, NumericalError, StoclockError

__all__ = ["clock", "linalg", "lindblad_ref", "qcore", "sse", "ConfigError", "NumericalError", "StoclockError"]
__version__ = "0.1.0"

"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`StoclockError`.  The subclasses of :class:`NumericalError` signal a
numerical failure (the CLI maps them to exit code 3); the others flag bad
inputs.
"""

from __future__ import annotations


class StoclockError(Exception):
    """Base class for all package errors."""


class NumericalError(StoclockError):
    """A computation could not produce a trustworthy result."""


class ConvergenceFailure(NumericalError):
    pass


class DegenerateNullSpace(NumericalError):
    """The two smallest singular values are too close to single out one null vector.

    Callers should fall back to :func:`stoclock.linalg.null_space_basis`.
    """

    def __init__(self, message: str, sigmas: tuple[float, float]):
        super().__init__(message)
        self.sigmas = sigmas


class RankMismatch(NumericalError):
    pass


class SupportOverlap(NumericalError):
    pass


class ZeroSlice(NumericalError):
    pass


class TimestepTooLarge(NumericalError):
    pass


class ZeroJumpProbability(NumericalError):
    pass


class NonHermitianInput(StoclockError, ValueError):
    pass


class InvalidParams(StoclockError, ValueError):
    pass


class DimensionMismatch(StoclockError, ValueError):
    pass


class EmptyEnsemble(StoclockError, ValueError):
    pass


class GridMisaligned(StoclockError, ValueError):
    pass


class RecipeMismatch(StoclockError, ValueError):
    pass


class ConfigError(StoclockError, ValueError):
    pass

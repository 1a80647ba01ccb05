"""State and open-system model types shared by the trajectory, master-equation
and clock routes.

Conventions: hbar = 1; for the two-level atom index 0 is the ground state
``|0>`` and index 1 the excited state ``|1>``.  Pure states are 1-d complex
arrays, density matrices 2-d complex arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyEnsemble, GridMisaligned, InvalidParams, NonHermitianInput

HERMITIAN_TOL = 1e-12
GRID_TOL = 1e-12

SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.conj().T


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(psi)
    if nrm == 0 or not np.isfinite(nrm):
        raise ValueError("cannot normalise a zero or non-finite vector")
    return psi / nrm


def pure_state(*amplitudes) -> np.ndarray:
    """Normalised state from raw amplitudes, e.g. ``pure_state(1, 1)``."""
    return normalize(np.array(amplitudes, dtype=np.complex128))


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def grid_steps(T: float, dt: float) -> int:
    """Number of ``dt`` steps in ``T``; raises unless ``T`` sits on the grid."""
    if not dt > 0:
        raise GridMisaligned(f"time step must be positive, got {dt}")
    if T < 0:
        raise GridMisaligned(f"runtime must be nonnegative, got {T}")
    n = int(round(T / dt))
    if abs(T - n * dt) > GRID_TOL:
        raise GridMisaligned(f"T={T} is not an integer multiple of dt={dt}")
    return n


@dataclass(frozen=True)
class TwoLevelParams:
    omega: float
    gamma: float

    def __post_init__(self):
        if not (np.isfinite(self.omega) and np.isfinite(self.gamma)):
            raise InvalidParams("omega and gamma must be finite")
        if self.omega <= 0:
            raise InvalidParams(f"omega must be positive, got {self.omega}")
        if self.gamma < 0:
            raise InvalidParams(f"emission rate must be nonnegative, got {self.gamma}")


@dataclass(frozen=True)
class LindbladModel:
    """System Hamiltonian plus jump operators ``C_m``.

    ``dissipator_half`` caches ``D = 1/2 sum_m C_m^H C_m``.
    """

    h_sys: np.ndarray
    jump_ops: tuple[np.ndarray, ...]
    dissipator_half: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h = np.array(self.h_sys, dtype=np.complex128)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatch(f"h_sys must be square, got {h.shape}")
        if np.linalg.norm(h - h.conj().T) > HERMITIAN_TOL:
            raise NonHermitianInput("system Hamiltonian is not Hermitian")
        ops = tuple(np.array(c, dtype=np.complex128) for c in self.jump_ops)
        for c in ops:
            if c.shape != h.shape:
                raise DimensionMismatch(f"jump operator shape {c.shape} != {h.shape}")
        d = np.zeros_like(h)
        for c in ops:
            d += c.conj().T @ c
        d = 0.25 * (d + d.conj().T)
        for arr in (h, d, *ops):
            arr.setflags(write=False)
        object.__setattr__(self, "h_sys", h)
        object.__setattr__(self, "jump_ops", ops)
        object.__setattr__(self, "dissipator_half", d)

    @property
    def dim(self) -> int:
        return self.h_sys.shape[0]

    @property
    def n_channels(self) -> int:
        return len(self.jump_ops)

    def free_propagator(self, dt: float) -> np.ndarray:
        """``R = 1 - i H dt - D dt``, the first-order no-jump propagator."""
        return np.eye(self.dim) - 1j * dt * self.h_sys - dt * self.dissipator_half

    def free_inverse(self, dt: float, exact: bool = True) -> np.ndarray:
        """Inverse of :meth:`free_propagator`; ``exact=False`` gives ``1 + i H dt + D dt``."""
        if exact:
            return np.linalg.inv(self.free_propagator(dt))
        return np.eye(self.dim) + 1j * dt * self.h_sys + dt * self.dissipator_half


def two_level_model(p: TwoLevelParams, jump: str = "sigma_minus") -> LindbladModel:
    """Spontaneously emitting two-level atom, ``H = omega |1><1|``.

    ``jump="sigma_minus"`` (default) uses ``C = sqrt(gamma) |0><1|``.
    ``jump="ground_projector"`` uses ``sqrt(gamma) |0><0|`` instead, for
    comparison runs only; it does not describe emission.
    """
    if not isinstance(p, TwoLevelParams):
        raise InvalidParams("expected TwoLevelParams")
    h = np.diag([0.0, p.omega]).astype(np.complex128)
    if jump == "sigma_minus":
        c = np.sqrt(p.gamma) * SIGMA_MINUS
    elif jump == "ground_projector":
        c = np.sqrt(p.gamma) * np.diag([1.0, 0.0]).astype(np.complex128)
    else:
        raise InvalidParams(f"unknown jump operator kind {jump!r}")
    return LindbladModel(h, (c,))


def density_from_states(states: Sequence[np.ndarray]) -> np.ndarray:
    """Ensemble average ``(1/m) sum_i |psi_i><psi_i|``."""
    if len(states) == 0:
        raise EmptyEnsemble("no states to average")
    dims = {np.shape(s) for s in states}
    if len(dims) != 1 or len(next(iter(dims))) != 1:
        raise DimensionMismatch(f"states have inconsistent shapes {sorted(dims)}")
    stack = np.asarray(states, dtype=np.complex128)
    # fixed-order contraction: result independent of how the list was produced
    rho = np.einsum("ki,kj->ij", stack, stack.conj()) / len(states)
    return 0.5 * (rho + rho.conj().T)


def check_density(rho, herm_tol: float = 1e-9, trace_tol: float = 1e-8, pos_tol: float = 1e-8) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and positive."""
    rho = np.asarray(rho)
    if np.abs(rho - rho.conj().T).max(initial=0.0) > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_tol:
        raise ValueError(f"density matrix trace {np.trace(rho)} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -pos_tol:
        raise ValueError("density matrix has a negative eigenvalue")


@dataclass(frozen=True)
class JumpProbabilityTable:
    """Per-slice jump probabilities ``dp[t, m] = dt <psi(t)|C_m^H C_m|psi(t)>``.

    ``survival[t]`` is the probability that no jump happened since the start
    of the current free-evolution segment, i.e. the squared norm of the
    unnormalised conditional state.  Clock dressing factors are built from it.
    """

    dp: np.ndarray
    survival: np.ndarray

    def __post_init__(self):
        dp = np.array(self.dp, dtype=float)
        surv = np.array(self.survival, dtype=float)
        if dp.ndim != 2 or surv.shape != (dp.shape[0],):
            raise DimensionMismatch("dp must be [N, M] and survival [N]")
        if dp.size and (dp.min() < 0 or dp.max() > 1):
            raise ValueError("jump probabilities must lie in [0, 1]")
        dp.setflags(write=False)
        surv.setflags(write=False)
        object.__setattr__(self, "dp", dp)
        object.__setattr__(self, "survival", surv)

    @property
    def dp_total(self) -> np.ndarray:
        return self.dp.sum(axis=1)

    @property
    def n_slices(self) -> int:
        return self.dp.shape[0]

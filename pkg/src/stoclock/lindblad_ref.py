"""Deterministic master-equation solutions used as the jump-free oracle.

The generator is the standard Lindblad form with ``C^H C`` inside the
anticommutator::

    d rho/dt = i [rho, H] - 1/2 sum_m {C_m^H C_m, rho} + sum_m C_m rho C_m^H
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .qcore import LindbladModel, TwoLevelParams, grid_steps


@dataclass(frozen=True)
class DensityTrace:
    grid: np.ndarray
    rhos: np.ndarray  # [n_times, d, d]

    def __post_init__(self):
        if len(self.grid) != len(self.rhos):
            raise DimensionMismatch("grid and rhos differ in length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("time grid must be strictly increasing")


def lindblad_rhs(rho, model: LindbladModel) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != model.h_sys.shape:
        raise DimensionMismatch(f"rho shape {rho.shape} does not match system dimension {model.dim}")
    h = model.h_sys
    out = 1j * (rho @ h - h @ rho)
    # dissipator_half already carries the 1/2
    d = model.dissipator_half
    out -= d @ rho + rho @ d
    for c in model.jump_ops:
        out += c @ rho @ c.conj().T
    return out


def rk4_propagate(rho0, model: LindbladModel, T: float, dt: float) -> DensityTrace:
    """Classical RK4; each stored state is re-Hermitised and trace-normalised.

    The clean-up is post-processing on the output grid and does not change the
    fourth-order accuracy of the scheme.
    """
    steps = grid_steps(T, dt)
    rho = np.array(rho0, dtype=np.complex128)
    if rho.shape != model.h_sys.shape:
        raise DimensionMismatch("rho0 does not match the model dimension")
    out = np.empty((steps + 1, *rho.shape), dtype=np.complex128)
    out[0] = rho
    f = lambda r: lindblad_rhs(r, model)  # noqa: E731
    for k in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * dt * k1)
        k3 = f(rho + 0.5 * dt * k2)
        k4 = f(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        rho /= np.trace(rho).real
        out[k + 1] = rho
    return DensityTrace(np.arange(steps + 1) * dt, out)


def analytic_two_level(rho0, p: TwoLevelParams, t: float) -> np.ndarray:
    """Closed-form damped two-level atom, ``C = sqrt(gamma) |0><1|``.

    Excited population decays as ``exp(-gamma t)``; the coherence ``rho_01``
    picks up ``exp((i omega - gamma/2) t)``.
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (2, 2):
        raise DimensionMismatch("analytic solution needs a 2x2 density matrix")
    excited = rho0[1, 1].real * np.exp(-p.gamma * t)
    coh = rho0[0, 1] * np.exp((1j * p.omega - 0.5 * p.gamma) * t)
    return np.array([[1.0 - excited, coh], [np.conj(coh), excited]], dtype=np.complex128)


def density_columns(d: int) -> list[str]:
    cols = []
    for i in range(d):
        for j in range(i, d):
            if i == j:
                cols.append(f"re_rho_{i}{j}")
            else:
                cols += [f"re_rho_{i}{j}", f"im_rho_{i}{j}"]
    return cols


def density_row(rho: np.ndarray) -> list[float]:
    d = rho.shape[0]
    vals = []
    for i in range(d):
        for j in range(i, d):
            if i == j:
                vals.append(float(rho[i, i].real))
            else:
                vals += [float(rho[i, j].real), float(rho[i, j].imag)]
    return vals


def write_density_csv(trace: DensityTrace, path) -> Path:
    """Rows ``t, re_rho_00, re_rho_01, im_rho_01, re_rho_11`` (upper triangle for d > 2)."""
    path = Path(path)
    d = trace.rhos.shape[1]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + density_columns(d))
        for t, rho in zip(trace.grid, trace.rhos):
            w.writerow([repr(float(t))] + [repr(x) for x in density_row(rho)])
    return path

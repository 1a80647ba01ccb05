"""Dense complex eigen- and null-space kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Clock
Hamiltonians at desk scale stay below a few thousand rows, so everything
here is dense.

The null-vector routines run inverse iteration on ``A^H A`` through an LU
factorisation of ``A``; nothing ever forms ``A^H A`` explicitly, so the
conditioning is that of ``A`` itself.  Further small singular directions are
found after deflating the ones already converged.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    ConvergenceFailure,
    DegenerateNullSpace,
    NonHermitianInput,
    RankMismatch,
)

NULL_TOL = 1e-10
EIG_TOL = 1e-8
DEGENERACY_TOL = 1e-7

_MAX_ITER = 500
_VEC_TOL = 1e-13
_PATIENCE = 20
_NULL_SCALE = 1e-8


@dataclass(frozen=True)
class EigResult:
    """Eigenpairs sorted by real part, with per-pair residuals ``||A v - lam v||``."""

    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray
    residual_norms: np.ndarray
    tol: float


def as_cmatrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _require_square(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")


def hermiticity_defect(a: np.ndarray) -> float:
    """Frobenius norm of ``A - A^H``."""
    return float(np.linalg.norm(a - a.conj().T))


def hermitian_eig(a, tol: float = EIG_TOL) -> EigResult:
    """Full eigendecomposition of a Hermitian matrix.

    Raises
    ------
    NonHermitianInput
        If ``||A - A^H||_F > 10 tol ||A||_F``.
    ConvergenceFailure
        If LAPACK fails or a residual exceeds ``tol * max(1, ||A||_2)``.
    """
    a = as_cmatrix(a)
    _require_square(a)
    scale = np.linalg.norm(a)
    if hermiticity_defect(a) > 10 * tol * scale:
        raise NonHermitianInput(
            f"Hermiticity defect {hermiticity_defect(a):.3e} exceeds {10 * tol * scale:.3e}"
        )
    herm = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    residuals = np.linalg.norm(a @ v - v * w, axis=0)
    bound = tol * max(1.0, float(np.abs(w).max(initial=0.0)))
    if residuals.size and residuals.max() > bound:
        raise ConvergenceFailure(f"eigen-residual {residuals.max():.3e} above {bound:.3e}")
    return EigResult(w.astype(np.complex128), v, residuals, tol)


class _InverseGram:
    """Applies ``(A^H A)^{-1}`` and ``(A A^H)^{-1}`` from one LU factorisation of ``A``.

    Exactly zero pivots (rank-deficient input) are nudged to a tiny value so
    that the solves amplify null directions instead of failing.
    """

    def __init__(self, a: np.ndarray):
        with warnings.catch_warnings():
            # exact singularity is the expected case here
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(a, check_finite=False)
        floor = np.finfo(float).eps * max(1.0, float(np.abs(a).max(initial=0.0)))
        diag = np.abs(np.diagonal(lu))
        small = diag < floor
        if small.any():
            lu = lu.copy()
            idx = np.flatnonzero(small)
            lu[idx, idx] = floor
        self._lu = (lu, piv)

    def _solve(self, x: np.ndarray, first: int, second: int) -> np.ndarray:
        y = sla.lu_solve(self._lu, x, trans=first, check_finite=False)
        y /= max(np.abs(y).max(), np.finfo(float).tiny)
        return sla.lu_solve(self._lu, y, trans=second, check_finite=False)

    def right(self, x: np.ndarray) -> np.ndarray:
        return self._solve(x, 2, 0)

    def left(self, x: np.ndarray) -> np.ndarray:
        return self._solve(x, 0, 2)


def _iterate(step, residual, n: int, seed: int, floor: float) -> np.ndarray:
    """Inverse iteration until the vector settles.

    Inside a degenerate null space the iterate may drift between equally good
    vectors; after a few sweeps any vector with ``residual(x) <= floor`` is
    accepted instead.
    """
    # fixed start vector keeps the routine a pure function of A
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    for it in range(_MAX_ITER):
        z = step(x)
        if not np.all(np.isfinite(z)):
            raise ConvergenceFailure("inverse iteration overflowed")
        z /= np.linalg.norm(z)
        ov = np.vdot(z, x)
        phase = ov / abs(ov) if abs(ov) > 0 else 1.0
        if np.linalg.norm(z * phase - x) <= _VEC_TOL:
            return z
        if it >= _PATIENCE and residual(z) <= floor:
            return z
        x = z
    raise ConvergenceFailure(f"inverse iteration did not settle in {_MAX_ITER} sweeps")


def _smallest_singular_triplets(a: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``k`` smallest singular values of ``A`` and their right vectors.

    Each triplet comes from inverse iteration; it is then moved to the top of
    the spectrum by the rank-one update ``A += (c - sigma) u v^H`` with ``c``
    above ``||A||_2``, and the next one is found the same way.
    """
    n = a.shape[0]
    c = 2.0 * max(np.abs(a).sum(axis=0).max(), np.abs(a).sum(axis=1).max(), 1.0)
    work = a.copy()
    sig, vecs = [], []
    for j in range(k):
        ops = _InverseGram(work)
        floor = 64 * np.finfo(float).eps * c
        v = _iterate(ops.right, lambda x: np.linalg.norm(work @ x), n, 0x5EED + j, floor)
        av = work @ v
        s = float(np.linalg.norm(av))
        if s > _NULL_SCALE * c:
            u = av / s
        else:
            # left vector is ill defined from A v; iterate on A A^H instead
            u = _iterate(ops.left, lambda x: np.linalg.norm(x.conj() @ work), n, 0xD1A + j, floor)
        sig.append(s)
        vecs.append(v)
        work = work + (c - s) * np.outer(u, v.conj())
    return np.array(sig), np.column_stack(vecs)


def near_null_vector(a, tol: float = NULL_TOL) -> tuple[np.ndarray, float]:
    """Unit vector ``v`` minimising ``||A v||`` and the estimate ``sigma_min``.

    Raises
    ------
    DegenerateNullSpace
        When the second-smallest singular value lies within ``10 tol`` of
        ``sigma_min``; ``v`` is then not well defined.
    """
    a = as_cmatrix(a)
    _require_square(a)
    n = a.shape[0]
    if n == 1:
        v = np.ones(1, dtype=np.complex128)
        return v, float(abs(a[0, 0]))
    s, v = _smallest_singular_triplets(a, 2)
    if s[1] - s[0] <= 10 * tol:
        raise DegenerateNullSpace(
            f"second singular value {s[1]:.3e} within {10 * tol:.1e} of {s[0]:.3e}",
            (float(s[0]), float(s[1])),
        )
    vec = v[:, 0] / np.linalg.norm(v[:, 0])
    return vec, float(np.linalg.norm(a @ vec))


def null_space_basis(a, k: int, tol: float = NULL_TOL) -> list[np.ndarray]:
    """``k`` orthonormal vectors with ``||A v|| <= tol`` each.

    Raises :class:`RankMismatch` if fewer than ``k`` such directions exist.
    """
    a = as_cmatrix(a)
    _require_square(a)
    n = a.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise RankMismatch(f"asked for {k} null vectors of a {n}x{n} matrix")
    _, v = _smallest_singular_triplets(a, k)
    q, _ = np.linalg.qr(v)
    resid = np.linalg.norm(a @ q, axis=0)
    if resid.max() > tol:
        found = int(np.sum(resid <= tol))
        raise RankMismatch(f"only {found} of {k} vectors satisfy ||Av|| <= {tol:.1e}")
    return [q[:, j].copy() for j in range(k)]


def group_levels(values, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    """Indices of sorted ``values`` grouped into levels closer than ``tol``."""
    values = np.asarray(values)
    groups: list[list[int]] = []
    for i, x in enumerate(values):
        if groups and abs(x - values[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups

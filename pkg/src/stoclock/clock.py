"""Feynman-Kitaev clock Hamiltonians for closed and open (quantum-jump) dynamics.

Layout: the clock register has ``N = T/dt + 1`` slices and the global index
of system state ``j`` at slice ``k`` is ``k * d_s + j``.  Every clock is a
sum of nearest-neighbour slice terms plus a penalty that pins slice 0 to
``psi0``::

    free term   -a_k R |k+1><k| - a_k^{-1} R^{-1} |k><k+1| + |k><k| + |k+1><k+1|
    jump term   (1 - |chi><chi|) (x) |k+1><k+1|
    penalty     (1 - |psi0><psi0|) (x) |0><0|

with ``R = 1 - i H dt - D dt``.  ``R^{-1}`` is the exact inverse unless a
builder is asked for the first-order expansion ``1 + i H dt + D dt``; only
the exact inverse gives a clock whose null vector is the stepped trajectory.
The dressing ``a_k = sqrt(S_k / S_{k+1})``, with ``S`` the no-jump survival
probability, equalises the slice norms of the null vector.

A jump term cuts the hopping between two slices, so a clock with ``n`` jumps
is block diagonal with ``n + 1`` free-evolution segments, each with its own
zero mode.  ``ClockHamiltonian.segments`` and ``.anchors`` record where the
segments start and the state each one is pinned to.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import scipy.linalg as sla

from .errors import (
    DegenerateNullSpace,
    DimensionMismatch,
    EmptyEnsemble,
    NonHermitianInput,
    RankMismatch,
    RecipeMismatch,
    SupportOverlap,
    TimestepTooLarge,
    ZeroJumpProbability,
    ZeroSlice,
)
from .linalg import DEGENERACY_TOL, NULL_TOL, group_levels, hermitian_eig, near_null_vector, null_space_basis
from .qcore import (
    HERMITIAN_TOL,
    JumpProbabilityTable,
    LindbladModel,
    density_from_states,
    grid_steps,
    normalize,
    projector,
)
from .sse import RngStream, Trajectory, UniformSource, draw_jump, propagate

BAND_EDGE = 4.0
BAND_TOL = 1e-6
SUPPORT_TOL = 1e-6
DEFAULT_SPECTRUM_CAP = 4096


@dataclass(frozen=True)
class ClockGrid:
    T: float
    dt: float
    d_s: int

    def __post_init__(self):
        if grid_steps(self.T, self.dt) < 1:
            raise ValueError("a clock needs at least two slices")
        if self.d_s < 1:
            raise DimensionMismatch("system dimension must be positive")

    @property
    def N(self) -> int:
        return grid_steps(self.T, self.dt) + 1

    @property
    def dim(self) -> int:
        return self.N * self.d_s

    @property
    def slice_weight(self) -> float:
        """``dt / (T + dt)``, the squared slice norm of a physical history state."""
        return 1.0 / self.N

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N) * self.dt

    def block(self, k: int) -> slice:
        return slice(k * self.d_s, (k + 1) * self.d_s)


# construction recipes --------------------------------------------------------


@dataclass(frozen=True)
class Unitary:
    pass


@dataclass(frozen=True)
class NonHermitian:
    dressed: bool = False
    exact_inverse: bool = True


@dataclass(frozen=True)
class StochasticExact:
    jumps: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SingleJump:
    """Perturbative sampler output; ``jumps == ()`` is the no-jump branch."""

    jumps: tuple[tuple[int, int], ...]

    @property
    def jump(self) -> tuple[int, int] | None:
        return self.jumps[0] if self.jumps else None


@dataclass(frozen=True)
class Disordered:
    base: "Recipe"
    delta_max: float
    seed: int
    stream_id: int


Recipe = Union[Unitary, NonHermitian, StochasticExact, SingleJump, Disordered]


@dataclass(frozen=True)
class ClockHamiltonian:
    matrix: np.ndarray
    grid: ClockGrid
    recipe: Recipe
    psi0: np.ndarray
    penalty: float = 1.0
    segments: tuple[int, ...] = (0,)
    anchors: tuple[np.ndarray, ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class HistoryState:
    vector: np.ndarray
    grid: ClockGrid

    def __post_init__(self):
        if self.vector.shape != (self.grid.dim,):
            raise DimensionMismatch(f"vector has shape {self.vector.shape}, grid needs ({self.grid.dim},)")
        if abs(np.linalg.norm(self.vector) - 1.0) > 1e-9:
            raise ValueError("history state must be unit norm")

    def slices(self) -> np.ndarray:
        """Unnormalised slice components, shape ``[N, d_s]``."""
        return self.vector.reshape(self.grid.N, self.grid.d_s)

    def slice_norms(self) -> np.ndarray:
        return np.linalg.norm(self.slices(), axis=1)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray  # real parts, ascending
    max_imag: float
    degenerate_pairs: tuple[tuple[int, int], ...]
    above_band: np.ndarray
    gap: float


@dataclass(frozen=True)
class DisorderSpec:
    """Diagonal static disorder with entries uniform in ``[0, delta_max]``."""

    delta_max: float
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not self.delta_max >= 0:
            raise ValueError("delta_max must be nonnegative")

    def sample(self, dim: int) -> np.ndarray:
        # offset keeps disorder draws independent of jump streams with the same seed
        rng = RngStream(self.seed, self.stream_id + (1 << 62))
        return self.delta_max * rng.uniforms(dim)


# assembly --------------------------------------------------------------------


@dataclass(frozen=True)
class _Free:
    down: np.ndarray
    up: np.ndarray


@dataclass(frozen=True)
class _Jump:
    target: np.ndarray  # rank-one operator the penalty removes


def _require_unit(psi0) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=np.complex128).reshape(-1)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValueError("initial state must be unit norm")
    return psi0


def _assemble(grid: ClockGrid, terms: Sequence[_Free | _Jump], psi0: np.ndarray, penalty: float) -> np.ndarray:
    d = grid.d_s
    eye = np.eye(d, dtype=np.complex128)
    m = np.zeros((grid.dim, grid.dim), dtype=np.complex128)
    for k, term in enumerate(terms):
        a, b = grid.block(k), grid.block(k + 1)
        if isinstance(term, _Free):
            m[b, a] -= term.down
            m[a, b] -= term.up
            m[a, a] += eye
            m[b, b] += eye
        else:
            m[b, b] += penalty * (eye - term.target)
    m[grid.block(0), grid.block(0)] += penalty * (eye - projector(psi0))
    return m


def _check_system(h_sys: np.ndarray, grid: ClockGrid, psi0: np.ndarray) -> None:
    if h_sys.shape != (grid.d_s, grid.d_s) or psi0.shape != (grid.d_s,):
        raise DimensionMismatch("system operators, psi0 and grid.d_s disagree")


def build_unitary_clock(h_sys, grid: ClockGrid, psi0, penalty: float = 1.0) -> ClockHamiltonian:
    """Closed-system clock with ``U = exp(-i H dt)``; Hermitian and positive semidefinite."""
    h = np.asarray(h_sys, dtype=np.complex128)
    psi0 = _require_unit(psi0)
    _check_system(h, grid, psi0)
    if np.linalg.norm(h - h.conj().T) > HERMITIAN_TOL:
        raise NonHermitianInput("system Hamiltonian is not Hermitian")
    u = sla.expm(-1j * grid.dt * h)
    terms = [_Free(u, u.conj().T)] * (grid.N - 1)
    mat = _assemble(grid, terms, psi0, penalty)
    return ClockHamiltonian(mat, grid, Unitary(), psi0, penalty, (0,), (psi0,))


def _dressing(survival: np.ndarray, k: int) -> float:
    return float(np.sqrt(survival[k] / survival[k + 1]))


def _free_terms(model: LindbladModel, dt: float, exact_inverse: bool) -> tuple[np.ndarray, np.ndarray]:
    return model.free_propagator(dt), model.free_inverse(dt, exact=exact_inverse)


def build_nonhermitian_clock(
    model: LindbladModel,
    grid: ClockGrid,
    psi0,
    probs: JumpProbabilityTable | None = None,
    penalty: float = 1.0,
    exact_inverse: bool = True,
) -> ClockHamiltonian:
    """Deterministic no-jump clock; dressed with ``probs.survival`` when given."""
    psi0 = _require_unit(psi0)
    _check_system(model.h_sys, grid, psi0)
    r, r_inv = _free_terms(model, grid.dt, exact_inverse)
    if probs is None:
        terms = [_Free(r, r_inv)] * (grid.N - 1)
    else:
        if probs.n_slices != grid.N:
            raise DimensionMismatch("probability table does not match the grid")
        if np.any(probs.dp_total >= 1.0):
            raise TimestepTooLarge("a slice has total jump probability >= 1")
        terms = []
        for k in range(grid.N - 1):
            a = _dressing(probs.survival, k)
            terms.append(_Free(a * r, r_inv / a))
    mat = _assemble(grid, terms, psi0, penalty)
    recipe = NonHermitian(dressed=probs is not None, exact_inverse=exact_inverse)
    return ClockHamiltonian(mat, grid, recipe, psi0, penalty, (0,), (psi0,))


# ground states ---------------------------------------------------------------


def _segment_rows(grid: ClockGrid, segments: Sequence[int], j: int) -> slice:
    stop = segments[j + 1] if j + 1 < len(segments) else grid.N
    return slice(segments[j] * grid.d_s, stop * grid.d_s)


def _place_segment(vec: np.ndarray, grid: ClockGrid, n_slices: int, anchor: np.ndarray) -> np.ndarray:
    """Scale a segment to ``n_slices`` times the slice weight and fix its phase on ``anchor``."""
    vec = vec * np.sqrt(n_slices * grid.slice_weight) / np.linalg.norm(vec)
    overlap = np.vdot(anchor, vec[: grid.d_s])
    if abs(overlap) > 0:
        vec = vec * (abs(overlap) / overlap)
    return vec


def _combine_segments(
    basis: Sequence[np.ndarray], grid: ClockGrid, segments: Sequence[int], anchors: Sequence[np.ndarray]
) -> HistoryState:
    if len(basis) != len(segments):
        raise RankMismatch(f"{len(basis)} basis vectors for {len(segments)} segments")
    b = np.column_stack(basis)
    out = np.zeros(grid.dim, dtype=np.complex128)
    for j in range(len(segments)):
        rows = _segment_rows(grid, segments, j)
        sub = b[rows]
        u, s, _ = np.linalg.svd(sub, full_matrices=False)
        # a separable null space restricts to a single direction on each segment
        if s[0] < SUPPORT_TOL or (len(s) > 1 and s[1] > SUPPORT_TOL):
            raise SupportOverlap(f"null space does not split on segment {j}: singular values {s[:2]}")
        n_slices = (rows.stop - rows.start) // grid.d_s
        out[rows] = _place_segment(u[:, 0], grid, n_slices, anchors[j])
    return HistoryState(out / np.linalg.norm(out), grid)


def jumped_state(psi, model: LindbladModel, channel: int) -> np.ndarray:
    phi = model.jump_ops[channel] @ np.asarray(psi, dtype=np.complex128)
    if np.linalg.norm(phi) < 1e-150:
        raise ZeroJumpProbability(f"channel {channel} annihilates the state")
    return normalize(phi)


def combine_degenerate(
    basis: Sequence[np.ndarray], eta0: HistoryState, jump: tuple[int, int], model: LindbladModel
) -> HistoryState:
    """Physical history state from the two-dimensional ground space of a one-jump clock.

    The basis is rotated onto the pre-jump and post-jump slice supports.  Each
    piece gets slice norm ``sqrt(dt / (T + dt))``; the pre-jump piece is phased
    so that slice 0 overlaps ``psi0`` positively, the post-jump piece so that its
    first slice overlaps the normalised jumped state ``C_m psi_0(s - dt)``
    positively.
    """
    s, m = jump
    slices = eta0.slices()
    anchors = (normalize(slices[0]), jumped_state(slices[s - 1], model, m))
    return _combine_segments(basis, eta0.grid, (0, s), anchors)


def _lowest_eigvec(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eig(a)
    return v[:, int(np.argmin(w.real))]


def _is_block_diagonal(mat: np.ndarray, grid: ClockGrid, segments: Sequence[int]) -> bool:
    mask = np.ones(mat.shape, dtype=bool)
    for j in range(len(segments)):
        rows = _segment_rows(grid, segments, j)
        mask[rows, rows] = False
    return not np.any(mat[mask])


def ground_history(clock: ClockHamiltonian, tol: float = NULL_TOL) -> HistoryState:
    """Right zero mode of the clock as a unit-norm history state.

    A clock with several segments has a degenerate zero space; its physical
    state is assembled segment by segment as in :func:`combine_degenerate`.
    Disordered clocks have no exact zero mode: each segment contributes its
    lowest eigenvector instead.
    """
    grid = clock.grid
    segs = clock.segments
    anchors = clock.anchors or (clock.psi0,)
    if isinstance(clock.recipe, Disordered):
        if not _is_block_diagonal(clock.matrix, grid, segs):
            segs, anchors = (0,), (clock.psi0,)
        out = np.zeros(grid.dim, dtype=np.complex128)
        for j in range(len(segs)):
            rows = _segment_rows(grid, segs, j)
            vec = _lowest_eigvec(clock.matrix[rows, rows])
            out[rows] = _place_segment(vec, grid, (rows.stop - rows.start) // grid.d_s, anchors[j])
        return HistoryState(out / np.linalg.norm(out), grid)
    try:
        vec, _ = near_null_vector(clock.matrix, tol)
    except DegenerateNullSpace:
        if len(segs) < 2:
            raise
        basis = null_space_basis(clock.matrix, len(segs), tol)
        return _combine_segments(basis, grid, segs, anchors)
    overlap = np.vdot(clock.psi0, vec[: grid.d_s])
    if abs(overlap) > 0:
        vec = vec * (abs(overlap) / overlap)
    return HistoryState(vec / np.linalg.norm(vec), grid)


def history_from_states(states, grid: ClockGrid) -> HistoryState:
    """``sqrt(dt/(T+dt)) sum_t |psi(t)> (x) |t>`` from normalised slice states."""
    states = np.asarray(states, dtype=np.complex128)
    if states.shape != (grid.N, grid.d_s):
        raise DimensionMismatch("need one state per slice")
    states = states / np.linalg.norm(states, axis=1, keepdims=True)
    return HistoryState(np.sqrt(grid.slice_weight) * states.reshape(-1), grid)


def measure_clock(eta: HistoryState, slice_index: int) -> np.ndarray:
    if not 0 <= slice_index < eta.grid.N:
        raise IndexError(f"slice {slice_index} outside [0, {eta.grid.N - 1}]")
    comp = eta.slices()[slice_index]
    nrm = np.linalg.norm(comp)
    if nrm < 1e-12:
        raise ZeroSlice(f"slice {slice_index} carries no weight")
    return comp / nrm


def ensemble_density_from_clocks(etas: Sequence[HistoryState], slice_index: int) -> np.ndarray:
    if len(etas) == 0:
        raise EmptyEnsemble("no history states to average")
    return density_from_states([measure_clock(e, slice_index) for e in etas])


# jump probabilities and stochastic ensembles --------------------------------


def jump_table_from_history(eta0: HistoryState, model: LindbladModel) -> JumpProbabilityTable:
    """Per-slice jump probabilities read off the no-jump history state.

    ``dp_m(t) = dt <eta0|C_m^H C_m (x) |t><t||eta0> / (w0 S(t))`` where ``w0``
    is the slice-0 weight (``psi0`` is normalised) and ``S(t)`` the no-jump
    survival probability.  For the undressed clock the slice weights are
    exactly ``w0 S(t)``, so ``S`` is read from them; the cumulative sum
    ``1 - sum dp`` approximates it only to first order in ``dt``.
    """
    grid = eta0.grid
    if model.dim != grid.d_s:
        raise DimensionMismatch("model and history state dimensions differ")
    slices = eta0.slices()
    weights = np.linalg.norm(slices, axis=1) ** 2
    w0 = weights[0]
    if w0 <= 0:
        raise ZeroSlice("history state has no weight on slice 0")
    survival = weights / w0
    if survival.min() <= 1e-300:
        raise TimestepTooLarge("no-jump survival probability reached zero")
    dp = np.empty((grid.N, model.n_channels))
    for m, c in enumerate(model.jump_ops):
        expect = np.linalg.norm(slices @ c.T, axis=1) ** 2 / w0
        dp[:, m] = grid.dt * expect / survival
    if np.any(dp.sum(axis=1) >= 1.0):
        raise TimestepTooLarge("a slice has total jump probability >= 1")
    return JumpProbabilityTable(dp, survival)


def _free_segment(model: LindbladModel, dt: float, start: np.ndarray, n: int):
    """States, jump probabilities and survival of ``n`` slices of no-jump evolution."""
    r = model.free_propagator(dt)
    states = np.empty((n, model.dim), dtype=np.complex128)
    survival = np.ones(n)
    states[0] = start
    for k in range(1, n):
        nxt = r @ states[k - 1]
        nrm = np.linalg.norm(nxt)
        survival[k] = survival[k - 1] * nrm**2
        states[k] = nxt / nrm
    dp = np.array([[dt * np.linalg.norm(c @ s) ** 2 for c in model.jump_ops] for s in states]).reshape(n, -1)
    return states, dp, survival


def _jump_target(model: LindbladModel, psi: np.ndarray, channel: int, dp_m: float, dt: float) -> np.ndarray:
    # (dt / dp_m) C|psi><psi|C^H: a projector once dp_m = dt <psi|C^H C|psi>
    if dp_m <= 0:
        raise ZeroJumpProbability(f"channel {channel} has zero jump probability")
    phi = model.jump_ops[channel] @ psi
    return (dt / dp_m) * np.outer(phi, phi.conj())


def sample_single_jump_clock(
    eta0: HistoryState,
    table: JumpProbabilityTable,
    model: LindbladModel,
    grid: ClockGrid,
    rng: UniformSource,
    penalty: float = 1.0,
    max_jumps: int = 1,
    exact_inverse: bool = True,
    psi0=None,
) -> ClockHamiltonian:
    """Draw one clock of the perturbative ensemble built on ``eta0``.

    Slices are walked with the SSE draw contract.  A jump at step ``t -> t+dt``
    replaces the free term by the jump penalty and starts a new segment that
    evolves freely from the jumped state.  After ``max_jumps`` jumps the
    remaining steps still consume their draws but stay free.

    ``psi0`` defaults to the normalised slice 0 of ``eta0``; pass the exact
    initial state to make the no-jump branch identical to the dressed clock.
    """
    if eta0.grid != grid or table.n_slices != grid.N:
        raise DimensionMismatch("eta0, table and grid disagree")
    if np.any(table.dp_total >= 1.0):
        raise TimestepTooLarge("a slice has total jump probability >= 1")
    r, r_inv = _free_terms(model, grid.dt, exact_inverse)
    seg_states = eta0.slices() / eta0.slice_norms()[:, None]
    seg_dp, seg_surv = table.dp, table.survival
    psi0 = seg_states[0] if psi0 is None else _require_unit(psi0)
    seg_start = 0
    segments, anchors, jumps = [0], [psi0], []
    terms: list[_Free | _Jump] = []
    for k in range(grid.N - 1):
        local = k - seg_start
        ch = draw_jump(rng, seg_dp[local])
        if ch is not None and len(jumps) < max_jumps:
            psi = seg_states[local]
            terms.append(_Jump(_jump_target(model, psi, ch, seg_dp[local, ch], grid.dt)))
            chi = jumped_state(psi, model, ch)
            seg_start = k + 1
            seg_states, seg_dp, seg_surv = _free_segment(model, grid.dt, chi, grid.N - seg_start)
            segments.append(seg_start)
            anchors.append(chi)
            jumps.append((k + 1, ch))
        else:
            a = _dressing(seg_surv, local)
            terms.append(_Free(a * r, r_inv / a))
    mat = _assemble(grid, terms, psi0, penalty)
    return ClockHamiltonian(mat, grid, SingleJump(tuple(jumps)), psi0, penalty, tuple(segments), tuple(anchors))


def clock_from_trajectory(
    traj: Trajectory, model: LindbladModel, grid: ClockGrid, penalty: float = 1.0, exact_inverse: bool = True
) -> ClockHamiltonian:
    """Exact stochastic clock whose local terms follow one SSE realisation."""
    if traj.n_slices != grid.N:
        raise DimensionMismatch("trajectory and grid disagree")
    r, r_inv = _free_terms(model, grid.dt, exact_inverse)
    landed = dict(traj.jumps)
    surv = traj.probs.survival
    terms: list[_Free | _Jump] = []
    segments, anchors = [0], [traj.states[0]]
    for k in range(grid.N - 1):
        if k + 1 in landed:
            ch = landed[k + 1]
            terms.append(_Jump(_jump_target(model, traj.states[k], ch, traj.probs.dp[k, ch], grid.dt)))
            segments.append(k + 1)
            anchors.append(traj.states[k + 1])
        else:
            a = _dressing(surv, k)
            terms.append(_Free(a * r, r_inv / a))
    mat = _assemble(grid, terms, traj.states[0], penalty)
    return ClockHamiltonian(
        mat, grid, StochasticExact(traj.jumps), traj.states[0], penalty, tuple(segments), tuple(anchors)
    )


def sample_exact_stochastic_clock(
    psi0, model: LindbladModel, grid: ClockGrid, rng: UniformSource, penalty: float = 1.0
) -> tuple[ClockHamiltonian, Trajectory]:
    """Co-generate an SSE trajectory and the multi-jump clock it defines.

    The clock depends on its own ground state; sharing one draw stream with
    the trajectory fixes that state up front, so ``H |eta> = 0`` can be
    checked directly instead of solving a nonlinear eigenproblem.
    """
    traj = propagate(psi0, model, grid.T, grid.dt, rng)
    return clock_from_trajectory(traj, model, grid, penalty), traj


def segment_hamiltonians(clock: ClockHamiltonian) -> list[np.ndarray]:
    """Split a clock into per-segment pieces that sum back to it."""
    if not _is_block_diagonal(clock.matrix, clock.grid, clock.segments):
        raise ValueError("clock couples its segments")
    parts = []
    for j in range(len(clock.segments)):
        rows = _segment_rows(clock.grid, clock.segments, j)
        part = np.zeros_like(clock.matrix)
        part[rows, rows] = clock.matrix[rows, rows]
        parts.append(part)
    return parts


def add_disorder(clock: ClockHamiltonian, spec: DisorderSpec) -> ClockHamiltonian:
    delta = spec.sample(clock.dim)
    recipe = Disordered(clock.recipe, spec.delta_max, spec.seed, spec.stream_id)
    return replace(clock, matrix=clock.matrix + np.diag(delta).astype(np.complex128), recipe=recipe)


# spectral analysis -----------------------------------------------------------


def _require_nonhermitian(clock: ClockHamiltonian, undressed: bool = False) -> None:
    rec = clock.recipe
    if not isinstance(rec, NonHermitian) or (undressed and rec.dressed):
        raise RecipeMismatch(f"needs an {'undressed ' if undressed else ''}non-Hermitian clock, got {rec}")


def _slice_operator(grid: ClockGrid, op_for_slice) -> np.ndarray:
    return sla.block_diag(*[op_for_slice(k) for k in range(grid.N)])


def similarity_transform(clock: ClockHamiltonian, model: LindbladModel) -> np.ndarray:
    """``O H O^{-1}`` with ``O|t> = (1 + t dt D)|t>`` and ``O^{-1}|t> = (1 - t dt D)|t>``.

    ``t`` is the slice index.  The second factor is the inverse only to first
    order, as is the Hermiticity of the result.
    """
    _require_nonhermitian(clock, undressed=True)
    grid = clock.grid
    eye = np.eye(grid.d_s)
    d = model.dissipator_half
    o = _slice_operator(grid, lambda k: eye + k * grid.dt * d)
    o_inv = _slice_operator(grid, lambda k: eye - k * grid.dt * d)
    return o @ clock.matrix @ o_inv


def normality_residual(clock: ClockHamiltonian, psi0) -> tuple[float, float]:
    """``(||[H, H^H]||_F, ||P [H, H^H] P||_F)`` with ``P = |psi0><psi0| (x) 1``."""
    _require_nonhermitian(clock)
    h = clock.matrix
    comm = h @ h.conj().T - h.conj().T @ h
    p = np.kron(np.eye(clock.grid.N), projector(_require_unit(psi0)))
    return float(np.linalg.norm(comm)), float(np.linalg.norm(p @ comm @ p))


def spectrum_report(clock: ClockHamiltonian, cap: int = DEFAULT_SPECTRUM_CAP) -> SpectrumReport:
    """Sorted spectrum with degeneracy pairing, above-band states and ground gap.

    Hermitian clocks go through :func:`hermitian_eig`; all others through
    LAPACK's nonsymmetric solver so imaginary parts are reported as found.
    """
    if clock.dim > cap:
        raise ValueError(f"clock dimension {clock.dim} exceeds the spectrum cap {cap}")
    if isinstance(clock.recipe, Unitary):
        values = hermitian_eig(clock.matrix).eigenvalues
    else:
        values = np.linalg.eigvals(clock.matrix)
    max_imag = float(np.abs(values.imag).max())
    real = np.sort(values.real)
    levels = group_levels(real, DEGENERACY_TOL)
    pairs = tuple((g[i], g[i + 1]) for g in levels for i in range(0, len(g) - 1, 2))
    gap = float(np.mean(real[levels[1]]) - np.mean(real[levels[0]])) if len(levels) > 1 else 0.0
    return SpectrumReport(real, max_imag, pairs, real[real > BAND_EDGE + BAND_TOL], max(gap, 0.0))


def gap_scan(
    model: LindbladModel, psi0, T_values: Sequence[float], dt: float, penalty: float = 1.0
) -> list[tuple[float, float]]:
    out = []
    for T in T_values:
        grid = ClockGrid(T, dt, model.dim)
        clock = build_nonhermitian_clock(model, grid, psi0, penalty=penalty)
        out.append((float(T), spectrum_report(clock).gap))
    return out


# csv dumps -------------------------------------------------------------------


def write_history_csv(eta: HistoryState, path) -> Path:
    """Rows ``slice, t, re_*, im_*, slice_norm``."""
    path = Path(path)
    d = eta.grid.d_s
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["slice", "t"] + [f"re_{j}" for j in range(d)] + [f"im_{j}" for j in range(d)] + ["slice_norm"])
        for k, (comp, nrm) in enumerate(zip(eta.slices(), eta.slice_norms())):
            w.writerow(
                [k, repr(float(k * eta.grid.dt))]
                + [repr(float(x)) for x in comp.real]
                + [repr(float(x)) for x in comp.imag]
                + [repr(float(nrm))]
            )
    return path


def write_spectrum_csv(report: SpectrumReport, path) -> Path:
    """Rows ``index, eigenvalue, pair_index, above_band``."""
    path = Path(path)
    partner = {}
    for i, j in report.degenerate_pairs:
        partner[i], partner[j] = j, i
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "eigenvalue", "pair_index", "above_band"])
        for i, lam in enumerate(report.eigenvalues):
            w.writerow([i, repr(float(lam)), partner.get(i, -1), int(lam > BAND_EDGE + BAND_TOL)])
    return path

"""Quantum-jump (Monte Carlo wave-function) unravelling of the master equation.

One trajectory step from slice ``t`` to ``t + dt``:

* compute ``dp_m = dt <psi|C_m^H C_m|psi>`` and ``dp = sum_m dp_m``;
* draw ``u`` uniform in [0, 1); if ``u >= dp`` take the free step
  ``psi -> R psi / ||R psi||`` with ``R = 1 - i H dt - D dt``;
* otherwise draw a second uniform to pick channel ``m`` with probability
  ``dp_m / dp`` and collapse ``psi -> C_m psi / ||C_m psi||``.

The draw order (one uniform per step, one more only on a jump) is a contract
shared with :mod:`stoclock.clock`, so a clock ensemble and an SSE ensemble
driven by the same :class:`RngStream` ids see the same jump record.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import TimestepTooLarge, ZeroJumpProbability
from .qcore import JumpProbabilityTable, LindbladModel, density_from_states, grid_steps, normalize

MAX_STEP_PROBABILITY = 0.5
_NO_JUMP_DRAW = float(np.nextafter(1.0, 0.0))
_MASK64 = (1 << 64) - 1


class UniformSource(Protocol):
    def uniform(self) -> float: ...


class RngStream:
    """Reproducible uniform stream keyed by ``(seed, stream_id)``.

    Backed by PCG64 seeded through ``SeedSequence(seed, spawn_key=(stream_id,))``,
    which is platform independent.  ``counter`` counts the draws consumed.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self.counter = 0
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def uniform(self) -> float:
        self.counter += 1
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        """The next ``n`` draws at once; same values as ``n`` calls to :meth:`uniform`."""
        self.counter += n
        return self._gen.random(n)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter})"


class ForcedJumpStream:
    """Scripted draws that force exactly one jump landing on ``jump_slice``.

    Every step draws "no jump" except step ``jump_slice - 1``, which draws 0.
    The following channel draw returns ``channel_draw``.
    """

    def __init__(self, jump_slice: int, channel_draw: float = 0.0):
        if jump_slice < 1:
            raise ValueError("a jump can only land on slice 1 or later")
        if not 0.0 <= channel_draw < 1.0:
            raise ValueError("channel_draw must lie in [0, 1)")
        self.jump_slice = jump_slice
        self.channel_draw = channel_draw
        self.counter = 0

    def uniform(self) -> float:
        idx = self.counter
        self.counter += 1
        if idx == self.jump_slice - 1:
            return 0.0
        if idx == self.jump_slice:
            return self.channel_draw
        return _NO_JUMP_DRAW


def pick_channel(dp: np.ndarray, v: float) -> int:
    total = dp.sum()
    cum = np.cumsum(dp) / total
    return int(min(np.searchsorted(cum, v, side="right"), len(dp) - 1))


def draw_jump(rng: UniformSource, dp: np.ndarray) -> int | None:
    """Consume draws for one step; return the jump channel or ``None`` for a free step."""
    u = rng.uniform()
    total = float(np.sum(dp))
    if u >= total:
        return None
    # drawn even for a single channel so the draw count does not depend on M
    v = rng.uniform()
    return pick_channel(np.asarray(dp), v)


@dataclass(frozen=True)
class Trajectory:
    """One SSE realisation on the slice grid ``t = 0, dt, ..., T``.

    ``states[k]`` is the normalised state at slice ``k``.  ``jumps`` lists
    ``(slice, channel)`` for every collapse; the slice is the one that holds
    the post-jump state.
    """

    states: np.ndarray
    jumps: tuple[tuple[int, int], ...]
    probs: JumpProbabilityTable
    dt: float

    @property
    def n_slices(self) -> int:
        return self.states.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_slices) * self.dt


def jump_probabilities(psi, model: LindbladModel, dt: float) -> np.ndarray:
    """``[dt <psi|C_m^H C_m|psi>]_m``; raises TimestepTooLarge above a total of 0.5."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    psi = np.asarray(psi, dtype=np.complex128)
    dp = np.array([dt * float(np.vdot(c @ psi, c @ psi).real) for c in model.jump_ops])
    if dp.sum() > MAX_STEP_PROBABILITY:
        raise TimestepTooLarge(f"step jump probability {dp.sum():.3g} exceeds {MAX_STEP_PROBABILITY}")
    return dp


def free_step(psi, model: LindbladModel, dt: float) -> np.ndarray:
    dp = jump_probabilities(psi, model, dt).sum()
    out = model.free_propagator(dt) @ np.asarray(psi, dtype=np.complex128) / np.sqrt(1.0 - dp)
    # the 1/sqrt(1 - dp) factor is only first-order accurate
    return normalize(out)


def jump_step(psi, model: LindbladModel, m: int, dt: float) -> np.ndarray:
    phi = model.jump_ops[m] @ np.asarray(psi, dtype=np.complex128)
    nrm = np.linalg.norm(phi)
    if nrm < 1e-150:
        raise ZeroJumpProbability(f"channel {m} annihilates the state")
    return phi / nrm


def propagate(psi0, model: LindbladModel, T: float, dt: float, rng: UniformSource) -> Trajectory:
    steps = grid_steps(T, dt)
    psi = normalize(psi0)
    R = model.free_propagator(dt)
    states = [psi]
    dps = []
    survival = [1.0]
    jumps = []
    for k in range(steps):
        dp = jump_probabilities(psi, model, dt)
        dps.append(dp)
        channel = draw_jump(rng, dp)
        if channel is None:
            nxt = free_step(psi, model, dt)
            survival.append(survival[-1] * float(np.linalg.norm(R @ psi)) ** 2)
        else:
            nxt = jump_step(psi, model, channel, dt)
            jumps.append((k + 1, channel))
            survival.append(1.0)
        states.append(nxt)
        psi = nxt
    dps.append(jump_probabilities(psi, model, dt))
    table = JumpProbabilityTable(np.array(dps).reshape(steps + 1, model.n_channels), np.array(survival))
    return Trajectory(np.array(states), tuple(jumps), table, dt)


def propagate_many(
    psi0, model: LindbladModel, T: float, dt: float, seed: int, stream_ids: Iterable[int]
) -> list[Trajectory]:
    """Vectorised :func:`propagate` over ``RngStream(seed, i)`` for every ``i``.

    Produces the same jump records as running :func:`propagate` per stream;
    states agree to rounding.
    """
    ids = list(stream_ids)
    steps = grid_steps(T, dt)
    n_traj, d, n_ch = len(ids), model.dim, model.n_channels
    draws = np.empty((n_traj, 2 * steps + 1))
    for i, sid in enumerate(ids):
        draws[i] = RngStream(seed, sid).uniforms(2 * steps + 1)
    R = model.free_propagator(dt)
    cs = np.array(model.jump_ops).reshape(n_ch, d, d)
    states = np.empty((n_traj, steps + 1, d), dtype=np.complex128)
    states[:, 0] = normalize(psi0)
    dps = np.empty((n_traj, steps + 1, n_ch))
    survival = np.ones((n_traj, steps + 1))
    ptr = np.zeros(n_traj, dtype=int)
    rows = np.arange(n_traj)
    jumps: list[list[tuple[int, int]]] = [[] for _ in ids]

    def probs(psi):
        phi = np.einsum("mij,tj->tmi", cs, psi)
        return phi, dt * np.sum(np.abs(phi) ** 2, axis=2)

    for k in range(steps):
        psi = states[:, k]
        phi, dp = probs(psi)
        total = dp.sum(axis=1)
        if (total > MAX_STEP_PROBABILITY).any():
            raise TimestepTooLarge(f"step jump probability {total.max():.3g} exceeds {MAX_STEP_PROBABILITY}")
        dps[:, k] = dp
        u = draws[rows, ptr]
        ptr += 1
        hit = u < total
        nxt = psi @ R.T
        nrm = np.linalg.norm(nxt, axis=1)
        survival[:, k + 1] = survival[:, k] * nrm**2
        nxt /= nrm[:, None]
        for i in np.flatnonzero(hit):
            v = draws[i, ptr[i]]
            ptr[i] += 1
            ch = pick_channel(dp[i], v)
            out = phi[i, ch]
            nxt[i] = out / np.linalg.norm(out)
            survival[i, k + 1] = 1.0
            jumps[i].append((k + 1, ch))
        states[:, k + 1] = nxt
    dps[:, steps] = probs(states[:, steps])[1]
    return [
        Trajectory(states[i], tuple(jumps[i]), JumpProbabilityTable(dps[i], survival[i]), dt)
        for i in range(n_traj)
    ]


def ensemble_density(trajs: Sequence[Trajectory], slice_index: int) -> np.ndarray:
    return density_from_states([t.states[slice_index] for t in trajs])


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    """Dump ``slice, t, re_amp_*, im_amp_*, jumped, channel`` rows."""
    path = Path(path)
    d = traj.states.shape[1]
    landed = dict(traj.jumps)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["slice", "t"] + [f"re_amp_{j}" for j in range(d)] + [f"im_amp_{j}" for j in range(d)] + ["jumped", "channel"])
        for k, psi in enumerate(traj.states):
            ch = landed.get(k, -1)
            w.writerow(
                [k, repr(k * traj.dt)]
                + [repr(float(x)) for x in psi.real]
                + [repr(float(x)) for x in psi.imag]
                + [int(ch >= 0), ch]
            )
    return path


def read_trajectory_csv(path) -> tuple[np.ndarray, tuple[tuple[int, int], ...]]:
    """Inverse of :func:`write_trajectory_csv`: ``(states, jumps)``."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    d = sum(1 for key in rows[0] if key.startswith("re_amp_"))
    states = np.array(
        [[float(r[f"re_amp_{j}"]) + 1j * float(r[f"im_amp_{j}"]) for j in range(d)] for r in rows]
    )
    jumps = tuple((int(r["slice"]), int(r["channel"])) for r in rows if r["jumped"] == "1")
    return states, jumps

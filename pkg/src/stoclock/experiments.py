"""Desk-scale experiment runner and the ``stoclock`` command line.

Usage::

    stoclock fig5 --config run.cfg --set gamma=0.3 --set m_trajectories=40 --out out/fig5

The config file is flat ``key = value`` text; ``#`` starts a comment.  Every
run writes ``report.txt`` plus CSV tables into ``--out``.  Exit status is 0
on success, 2 for a bad configuration and 3 for a numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import clock as ck
from .errors import ConfigError, GridMisaligned, InvalidParams, NumericalError, StoclockError
from .lindblad_ref import analytic_two_level, density_columns, density_row, rk4_propagate, write_density_csv
from .qcore import TwoLevelParams, density_from_states, grid_steps, normalize, projector, two_level_model
from .sse import ForcedJumpStream, RngStream, propagate, propagate_many, write_trajectory_csv

EXPERIMENTS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "gap_scan", "convergence")

# penalty weight that puts the single above-band eigenvalue at 7.3 for the
# default fig2 clock; recomputed by the fig2 sweep
FITTED_PENALTY = 6.104078
ABOVE_BAND_TARGET = 7.3
_CHUNK = 4096


@dataclass(frozen=True)
class RunConfig:
    experiment: str = "fig1"
    omega: float = 1.0
    gamma: float = 0.2
    T: float = 1.0
    dt: float = 0.05
    psi0: tuple[complex, ...] = (1.0, 1.0)
    m_trajectories: int = 20
    seed: int = 2024
    delta_max: float = 0.01
    penalty: float = FITTED_PENALTY
    exact_inverse: bool = True
    jump: str = "sigma_minus"
    jump_slice: int = 0  # 0 picks the middle slice
    T_values: tuple[float, ...] = ()
    m_values: tuple[int, ...] = (100, 400, 1600, 6400)
    pool_size: int = 102400
    rk4_dt: float = 1e-3
    workers: int = 1

    def state(self) -> np.ndarray:
        return normalize(np.array(self.psi0, dtype=np.complex128))

    def params(self) -> TwoLevelParams:
        return TwoLevelParams(self.omega, self.gamma)


# experiment-specific defaults, applied before the config file
EXPERIMENT_DEFAULTS: dict[str, dict] = {
    "fig3": {"T": 1.95},
    "fig4": {"T": 1.95},
    "fig6": {"dt": 0.25, "T_values": (2.5, 10.0), "m_trajectories": 40},
    "gap_scan": {"T_values": (1.0, 2.0, 4.0, 8.0)},
    # the first-order free step biases the decay rate by ~omega^2 dt
    "convergence": {"dt": 1e-3},
}


@dataclass
class RunReport:
    experiment: str
    out_dir: Path
    files: dict[str, Path] = field(default_factory=dict)
    metrics: dict[str, float] = field(default_factory=dict)
    runtime_s: float = 0.0

    def write(self, config: RunConfig) -> Path:
        path = self.out_dir / "report.txt"
        lines = [f"experiment = {self.experiment}"]
        lines += [f"config.{f.name} = {_format(getattr(config, f.name))}" for f in fields(config)]
        lines += [f"metric.{k} = {_format(v)}" for k, v in self.metrics.items()]
        lines += [f"file.{k} = {v.name}" for k, v in self.files.items()]
        lines.append(f"runtime_s = {self.runtime_s:.3f}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


def _format(v) -> str:
    if isinstance(v, tuple):
        return ",".join(_format(x) for x in v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# config parsing --------------------------------------------------------------


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


_PARSERS: dict[str, Callable[[str], object]] = {
    "experiment": str.strip,
    "omega": float,
    "gamma": float,
    "T": float,
    "dt": float,
    "psi0": lambda s: tuple(complex(x.replace(" ", "")) for x in s.split(",")),
    "m_trajectories": int,
    "seed": int,
    "delta_max": float,
    "penalty": float,
    "exact_inverse": _parse_bool,
    "jump": str.strip,
    "jump_slice": int,
    "T_values": lambda s: tuple(float(x) for x in s.split(",") if x.strip()),
    "m_values": lambda s: tuple(int(x) for x in s.split(",") if x.strip()),
    "pool_size": int,
    "rk4_dt": float,
    "workers": int,
}


def parse_pairs(lines: Iterable[str], source: str) -> dict[str, object]:
    out: dict[str, object] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}; known keys: {', '.join(_PARSERS)}")
        try:
            out[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return out


def load_config(experiment: str, path: str | Path | None = None, overrides: Sequence[str] = ()) -> RunConfig:
    """Defaults, then experiment defaults, then the file, then ``--set`` overrides."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose one of {', '.join(EXPERIMENTS)}")
    values: dict[str, object] = dict(EXPERIMENT_DEFAULTS.get(experiment, {}))
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        values.update(parse_pairs(text.splitlines(), str(path)))
    values.update(parse_pairs(overrides, "--set"))
    named = values.pop("experiment", experiment)
    if named != experiment:
        raise ConfigError(f"config names experiment {named!r} but {experiment!r} was requested")
    cfg = RunConfig(experiment=experiment, **values)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    try:
        cfg.params()
        for T in (cfg.T, *cfg.T_values):
            grid_steps(T, cfg.dt)
            if T <= 0:
                raise GridMisaligned("T must be positive")
        grid_steps(cfg.T, cfg.rk4_dt)
    except (InvalidParams, GridMisaligned) as exc:
        raise ConfigError(f"{exc}; adjust omega/gamma or make every T a multiple of dt") from None
    if len(cfg.psi0) != 2:
        raise ConfigError("psi0 needs two amplitudes, e.g. psi0 = 1,1")
    if not np.any(np.abs(cfg.psi0)):
        raise ConfigError("psi0 must not be the zero vector")
    if cfg.m_trajectories < 1 or cfg.workers < 1:
        raise ConfigError("m_trajectories and workers must be >= 1")
    if not cfg.delta_max >= 0 or not cfg.penalty > 0:
        raise ConfigError("delta_max must be >= 0 and penalty > 0")
    if cfg.jump not in ("sigma_minus", "ground_projector"):
        raise ConfigError("jump must be sigma_minus or ground_projector")
    if cfg.experiment == "convergence":
        if not cfg.m_values or min(cfg.m_values) < 1 or max(cfg.m_values) > cfg.pool_size:
            raise ConfigError("m_values must be positive and no larger than pool_size")
    n = grid_steps(cfg.T, cfg.dt) + 1
    if cfg.experiment in ("fig3", "fig4") and not 0 <= cfg.jump_slice < n:
        raise ConfigError(f"jump_slice must lie in [1, {n - 1}] (0 picks the middle)")


# shared pieces ---------------------------------------------------------------


def _model(cfg: RunConfig):
    return two_level_model(cfg.params(), cfg.jump)


def _pmap(cfg: RunConfig, fn, items):
    if cfg.workers == 1:
        return [fn(x) for x in items]
    # ordered map: results do not depend on scheduling
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(fn, items))


def _no_jump(cfg: RunConfig, model, grid: ck.ClockGrid):
    clock = ck.build_nonhermitian_clock(model, grid, cfg.state(), penalty=cfg.penalty, exact_inverse=cfg.exact_inverse)
    return clock, ck.ground_history(clock)


def _jump_slice(cfg: RunConfig, grid: ck.ClockGrid) -> int:
    return cfg.jump_slice or grid.N // 2


def _state_deviation(eta: ck.HistoryState, states: np.ndarray) -> float:
    """Largest per-slice distance to ``states`` after removing a global phase per slice."""
    worst = 0.0
    for k, ref in enumerate(states):
        s = ck.measure_clock(eta, k)
        ov = np.vdot(ref, s)
        phase = ov / abs(ov) if abs(ov) > 0 else 1.0
        worst = max(worst, float(np.linalg.norm(s / phase - ref)))
    return worst


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return path


def _write_populations(path: Path, eta: ck.HistoryState) -> Path:
    rows = []
    for k in range(eta.grid.N):
        rho = projector(ck.measure_clock(eta, k))
        rows.append([k, k * eta.grid.dt, rho[0, 0].real, rho[1, 1].real, rho[0, 1].real, rho[0, 1].imag])
    return _write_rows(path, ["slice", "t", "p_ground", "p_excited", "re_coherence", "im_coherence"], rows)


def _write_density_table(path: Path, grid: ck.ClockGrid, sources: dict[str, np.ndarray]) -> Path:
    cols = density_columns(grid.d_s)
    header = ["slice", "t"] + [f"{name}_{c}" for name in sources for c in cols]
    rows = []
    for k in range(grid.N):
        row = [k, k * grid.dt]
        for rhos in sources.values():
            row += density_row(rhos[k])
        rows.append(row)
    return _write_rows(path, header, rows)


def _lindblad_on_grid(cfg: RunConfig, model, grid: ck.ClockGrid) -> np.ndarray:
    trace = rk4_propagate(projector(cfg.state()), model, grid.T, cfg.rk4_dt)
    stride = grid_steps(grid.dt, cfg.rk4_dt)
    return trace.rhos[::stride]


# experiments -----------------------------------------------------------------


def run_fig1(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    """No-jump history state: slice populations and coherences."""
    model = _model(cfg)
    grid = ck.ClockGrid(cfg.T, cfg.dt, 2)
    clock, eta = _no_jump(cfg, model, grid)
    traj = propagate(cfg.state(), model, cfg.T, cfg.dt, ForcedJumpStream(grid.N + 1))
    rep.files["history"] = ck.write_history_csv(eta, out / "fig1_history.csv")
    rep.files["populations"] = _write_populations(out / "fig1_populations.csv", eta)
    rep.metrics["ground_residual"] = float(np.linalg.norm(clock.matrix @ eta.vector))
    rep.metrics["max_dev_vs_sse_no_jump"] = _state_deviation(eta, traj.states)
    norms = eta.slice_norms()
    rep.metrics["slice_norm_spread"] = float(norms.max() / norms.min())


def penalty_sweep(cfg: RunConfig, penalties: Sequence[float]) -> list[tuple[float, float]]:
    model = _model(cfg)
    grid = ck.ClockGrid(cfg.T, cfg.dt, 2)
    rows = []
    for c in penalties:
        clock = ck.build_nonhermitian_clock(model, grid, cfg.state(), penalty=c, exact_inverse=cfg.exact_inverse)
        rows.append((float(c), float(np.linalg.eigvals(clock.matrix).real.max())))
    return rows


def fit_penalty(cfg: RunConfig, target: float = ABOVE_BAND_TARGET) -> float | None:
    """Penalty weight whose top clock eigenvalue equals ``target``, if bracketed."""
    top = lambda c: penalty_sweep(cfg, [c])[0][1] - target  # noqa: E731
    lo, hi = 2.5, 50.0
    if top(lo) * top(hi) > 0:
        return None
    return float(brentq(top, lo, hi, xtol=1e-10))


def run_fig2(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    """Spectrum of the no-jump clock, plus a penalty sweep of its top eigenvalue."""
    model = _model(cfg)
    grid = ck.ClockGrid(cfg.T, cfg.dt, 2)
    clock, _ = _no_jump(cfg, model, grid)
    spec = ck.spectrum_report(clock)
    rep.files["spectrum"] = ck.write_spectrum_csv(spec, out / "fig2_spectrum.csv")
    sweep = penalty_sweep(cfg, np.linspace(1.0, 10.0, 37))
    rep.files["penalty_sweep"] = _write_rows(out / "fig2_penalty_sweep.csv", ["penalty", "top_eigenvalue"], sweep)
    rep.metrics["min_eigenvalue"] = float(spec.eigenvalues[0])
    rep.metrics["max_imag"] = spec.max_imag
    rep.metrics["n_above_band"] = len(spec.above_band)
    rep.metrics["top_eigenvalue"] = float(spec.eigenvalues[-1])
    rep.metrics["gap"] = spec.gap
    fitted = fit_penalty(cfg)
    rep.metrics["fitted_penalty"] = float("nan") if fitted is None else fitted


def _forced_single_jump(cfg: RunConfig):
    model = _model(cfg)
    grid = ck.ClockGrid(cfg.T, cfg.dt, 2)
    _, eta0 = _no_jump(cfg, model, grid)
    table = ck.jump_table_from_history(eta0, model)
    s = _jump_slice(cfg, grid)
    clock = ck.sample_single_jump_clock(
        eta0, table, model, grid, ForcedJumpStream(s), penalty=cfg.penalty, exact_inverse=cfg.exact_inverse,
        psi0=cfg.state(),
    )
    if clock.recipe.jump != (s, 0):
        raise NumericalError(f"forced jump at slice {s} was not taken")
    return model, grid, eta0, clock, s


def run_fig3(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    """Ground pair of a clock with one forced jump, combined into one history state."""
    model, grid, eta0, clock, s = _forced_single_jump(cfg)
    basis = ck.null_space_basis(clock.matrix, 2)
    eta = ck.combine_degenerate(basis, eta0, (s, 0), model)
    traj = propagate(cfg.state(), model, cfg.T, cfg.dt, ForcedJumpStream(s))
    rep.files["history"] = ck.write_history_csv(eta, out / "fig3_history.csv")
    rep.files["populations"] = _write_populations(out / "fig3_populations.csv", eta)
    rep.files["trajectory"] = write_trajectory_csv(traj, out / "fig3_trajectory.csv")
    rep.metrics["jump_slice"] = s
    rep.metrics["ground_residual"] = float(np.linalg.norm(clock.matrix @ eta.vector))
    rep.metrics["max_dev_vs_sse"] = float(
        np.abs(eta.slices() / np.sqrt(grid.slice_weight) - traj.states).max()
    )


def run_fig4(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    """Spectrum of the forced single-jump clock."""
    _, _, _, clock, s = _forced_single_jump(cfg)
    spec = ck.spectrum_report(clock)
    rep.files["spectrum"] = ck.write_spectrum_csv(spec, out / "fig4_spectrum.csv")
    paired = {i for p in spec.degenerate_pairs for i in p}
    rep.metrics["jump_slice"] = s
    rep.metrics["n_pairs"] = len(spec.degenerate_pairs)
    rep.metrics["n_unpaired"] = clock.dim - len(paired)
    rep.metrics["ground_multiplicity"] = int(np.sum(np.abs(spec.eigenvalues) < 1e-8))
    rep.metrics["max_pair_split"] = max(
        (abs(spec.eigenvalues[i] - spec.eigenvalues[j]) for i, j in spec.degenerate_pairs), default=0.0
    )
    rep.metrics["max_imag"] = spec.max_imag


def clock_ensemble(cfg: RunConfig, model, grid: ck.ClockGrid, eta0, table) -> list[ck.HistoryState]:
    def one(i):
        clock = ck.sample_single_jump_clock(
            eta0, table, model, grid, RngStream(cfg.seed, i), penalty=cfg.penalty, exact_inverse=cfg.exact_inverse,
            psi0=cfg.state(),
        )
        return ck.ground_history(clock)

    return _pmap(cfg, one, range(cfg.m_trajectories))


def run_fig5(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    """Clock ensemble density against the SSE ensemble on the same draw streams."""
    model = _model(cfg)
    grid = ck.ClockGrid(cfg.T, cfg.dt, 2)
    _, eta0 = _no_jump(cfg, model, grid)
    table = ck.jump_table_from_history(eta0, model)
    etas = clock_ensemble(cfg, model, grid, eta0, table)
    trajs = [propagate(cfg.state(), model, cfg.T, cfg.dt, RngStream(cfg.seed, i)) for i in range(cfg.m_trajectories)]
    rho_clock = np.array([ck.ensemble_density_from_clocks(etas, k) for k in range(grid.N)])
    rho_sse = np.array([density_from_states([t.states[k] for t in trajs]) for k in range(grid.N)])
    rho_lind = _lindblad_on_grid(cfg, model, grid)
    rep.files["density"] = _write_density_table(
        out / "fig5_density.csv", grid, {"clock": rho_clock, "sse": rho_sse, "lindblad": rho_lind}
    )
    rep.metrics["max_abs_clock_vs_sse"] = float(np.abs(rho_clock - rho_sse).max())
    rep.metrics["max_frob_clock_vs_lindblad"] = float(np.linalg.norm(rho_clock - rho_lind, axis=(1, 2)).max())
    rep.metrics["n_jumps"] = sum(len(t.jumps) for t in trajs)


def disorder_deviation(cfg: RunConfig, T: float) -> np.ndarray:
    """Per-slice ``||rho_clock - rho_SSE||_F`` for a disordered stochastic-clock ensemble."""
    model = _model(cfg)
    grid = ck.ClockGrid(T, cfg.dt, 2)

    def one(i):
        clock, traj = ck.sample_exact_stochastic_clock(cfg.state(), model, grid, RngStream(cfg.seed, i), cfg.penalty)
        noisy = ck.add_disorder(clock, ck.DisorderSpec(cfg.delta_max, cfg.seed, i))
        return ck.ground_history(noisy), traj

    pairs = _pmap(cfg, one, range(cfg.m_trajectories))
    dev = np.empty(grid.N)
    for k in range(grid.N):
        rho_c = ck.ensemble_density_from_clocks([e for e, _ in pairs], k)
        rho_s = density_from_states([t.states[k] for _, t in pairs])
        dev[k] = np.linalg.norm(rho_c - rho_s)
    return dev


def run_fig6(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    """Static disorder: deviation from the SSE ensemble at several runtimes."""
    rows = []
    for T in cfg.T_values:
        dev = disorder_deviation(cfg, T)
        rows += [(T, k, k * cfg.dt, d) for k, d in enumerate(dev)]
        rep.metrics[f"max_dev_T{T:g}"] = float(dev.max())
        rep.metrics[f"delta_T2_T{T:g}"] = cfg.delta_max * T**2
    rep.files["deviation"] = _write_rows(out / "fig6_deviation.csv", ["T", "slice", "t", "frobenius_deviation"], rows)


def run_gap_scan(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    model = _model(cfg)
    rows = ck.gap_scan(model, cfg.state(), cfg.T_values, cfg.dt, penalty=cfg.penalty)
    rep.files["gaps"] = _write_rows(out / "gap_scan.csv", ["T", "gap"], rows)
    if len(rows) > 1:
        t, g = np.array(rows).T
        rep.metrics["gap_exponent"] = float(np.polyfit(np.log(t), np.log(g), 1)[0])


def convergence_table(cfg: RunConfig) -> list[tuple[int, int, float]]:
    """RMS Frobenius error of ``m``-trajectory densities at ``t = T`` against the exact solution.

    One pool of ``pool_size`` trajectories is split into disjoint groups of
    ``m``; the RMS over groups smooths the single-sample noise of the fit.
    """
    model = _model(cfg)
    final = np.empty((cfg.pool_size, 2), dtype=np.complex128)
    # chunks bound the memory; streams are independent so the split is invisible
    for lo in range(0, cfg.pool_size, _CHUNK):
        ids = range(lo, min(lo + _CHUNK, cfg.pool_size))
        trajs = propagate_many(cfg.state(), model, cfg.T, cfg.dt, cfg.seed, ids)
        final[lo : lo + len(ids)] = [t.states[-1] for t in trajs]
    rho0 = projector(cfg.state())
    if cfg.jump == "sigma_minus":
        exact = analytic_two_level(rho0, cfg.params(), cfg.T)
    else:
        exact = rk4_propagate(rho0, model, cfg.T, cfg.rk4_dt).rhos[-1]
    rows = []
    for m in cfg.m_values:
        n_sub = cfg.pool_size // m
        errs = [np.linalg.norm(density_from_states(final[j * m : (j + 1) * m]) - exact) for j in range(n_sub)]
        rows.append((m, n_sub, float(np.sqrt(np.mean(np.square(errs))))))
    return rows


def run_convergence(cfg: RunConfig, out: Path, rep: RunReport) -> None:
    rows = convergence_table(cfg)
    rep.files["convergence"] = _write_rows(out / "convergence.csv", ["m", "n_groups", "rms_frobenius_error"], rows)
    if len(rows) > 1:
        m, _, err = np.array(rows).T
        rep.metrics["slope"] = float(np.polyfit(np.log(m), np.log(err), 1)[0])
    model = _model(cfg)
    trace = rk4_propagate(projector(cfg.state()), model, cfg.T, cfg.rk4_dt)
    rep.files["lindblad"] = write_density_csv(trace, out / "convergence_lindblad.csv")
    if cfg.jump == "sigma_minus":
        rho0 = projector(cfg.state())
        rep.metrics["rk4_vs_analytic"] = max(
            float(np.abs(r - analytic_two_level(rho0, cfg.params(), t)).max()) for t, r in zip(trace.grid, trace.rhos)
        )


RUNNERS = {
    "fig1": run_fig1,
    "fig2": run_fig2,
    "fig3": run_fig3,
    "fig4": run_fig4,
    "fig5": run_fig5,
    "fig6": run_fig6,
    "gap_scan": run_gap_scan,
    "convergence": run_convergence,
}


def run(cfg: RunConfig, out_dir: str | Path) -> RunReport:
    validate(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = RunReport(cfg.experiment, out)
    start = time.perf_counter()
    RUNNERS[cfg.experiment](cfg, out, rep)
    rep.runtime_s = time.perf_counter() - start
    rep.files["report"] = rep.write(cfg)
    return rep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stoclock", description="Run a stochastic-clock experiment.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    parser.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.experiment, args.config, args.overrides)
        rep = run(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except StoclockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for key, value in rep.metrics.items():
        print(f"{key} = {_format(value)}")
    print(f"wrote {len(rep.files)} files to {rep.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

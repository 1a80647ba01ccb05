from __future__ import annotations

import csv

import numpy as np
import pytest

from stoclock.errors import ConfigError
from stoclock.experiments import (
    FITTED_PENALTY,
    RunConfig,
    fit_penalty,
    load_config,
    main,
    parse_pairs,
    run,
)

HEADERS = {
    "fig1": {
        "fig1_history.csv": "slice,t,re_0,re_1,im_0,im_1,slice_norm",
        "fig1_populations.csv": "slice,t,p_ground,p_excited,re_coherence,im_coherence",
    },
    "fig2": {
        "fig2_spectrum.csv": "index,eigenvalue,pair_index,above_band",
        "fig2_penalty_sweep.csv": "penalty,top_eigenvalue",
    },
    "fig3": {
        "fig3_history.csv": "slice,t,re_0,re_1,im_0,im_1,slice_norm",
        "fig3_trajectory.csv": "slice,t,re_amp_0,re_amp_1,im_amp_0,im_amp_1,jumped,channel",
    },
    "fig4": {"fig4_spectrum.csv": "index,eigenvalue,pair_index,above_band"},
    "fig5": {
        "fig5_density.csv": ",".join(
            ["slice", "t"]
            + [f"{s}_{c}" for s in ("clock", "sse", "lindblad") for c in ("re_rho_00", "re_rho_01", "im_rho_01", "re_rho_11")]
        )
    },
    "fig6": {"fig6_deviation.csv": "T,slice,t,frobenius_deviation"},
    "gap_scan": {"gap_scan.csv": "T,gap"},
    "convergence": {
        "convergence.csv": "m,n_groups,rms_frobenius_error",
        "convergence_lindblad.csv": "t,re_rho_00,re_rho_01,im_rho_01,re_rho_11",
    },
}

# small settings so every experiment runs in well under a second
QUICK = {
    "fig6": ["T_values=2.5,5", "m_trajectories=4"],
    "gap_scan": ["T_values=1,2"],
    "convergence": ["pool_size=400", "m_values=10,40", "dt=0.01", "rk4_dt=0.01"],
}


def test_parse_pairs():
    got = parse_pairs(["# comment", "", "gamma = 0.3  # inline", "psi0 = 1, 1j", "T_values=1,2"], "x")
    assert got == {"gamma": 0.3, "psi0": (1 + 0j, 1j), "T_values": (1.0, 2.0)}


@pytest.mark.parametrize(
    "lines",
    [["nonsense"], ["colour = red"], ["gamma = fast"], ["exact_inverse = maybe"]],
)
def test_parse_pairs_errors(lines):
    with pytest.raises(ConfigError):
        parse_pairs(lines, "x")


def test_layering(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("gamma = 0.3\nseed = 5\n", encoding="utf-8")
    cfg = load_config("fig3", cfg_file, ["seed=6"])
    assert (cfg.T, cfg.gamma, cfg.seed) == (1.95, 0.3, 6)
    assert load_config("fig6").dt == 0.25
    assert load_config("fig1").T == 1.0


@pytest.mark.parametrize(
    "overrides",
    [["T=1.03"], ["gamma=-1"], ["m_trajectories=0"], ["psi0=0,0"], ["psi0=1,0,0"], ["experiment=fig2"], ["jump=x"]],
)
def test_invalid_configs(overrides):
    with pytest.raises(ConfigError):
        load_config("fig1", None, overrides)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config("fig1", tmp_path / "absent.cfg")


def test_exit_codes(tmp_path, capsys):
    assert main(["fig1", "--set", "colour=red", "--out", str(tmp_path)]) == 2
    assert "unknown key" in capsys.readouterr().err
    # jump probability per step above one half
    assert main(["fig1", "--set", "gamma=30", "--out", str(tmp_path)]) == 3
    assert main(["fig1", "--out", str(tmp_path / "ok")]) == 0
    with pytest.raises(SystemExit) as info:
        main(["fig9", "--out", str(tmp_path)])
    assert info.value.code == 2


@pytest.mark.parametrize("experiment", sorted(HEADERS))
def test_csv_schemas(experiment, tmp_path):
    cfg = load_config(experiment, None, QUICK.get(experiment, []))
    rep = run(cfg, tmp_path)
    for name, header in HEADERS[experiment].items():
        with (tmp_path / name).open(newline="") as fh:
            rows = list(csv.reader(fh))
        assert ",".join(rows[0]) == header
        assert len(rows) > 1 and all(len(r) == len(rows[0]) for r in rows)
    report = (tmp_path / "report.txt").read_text()
    assert f"experiment = {experiment}" in report
    assert all(p.exists() for p in rep.files.values())


def closed_system_drift(tmp_path, dt):
    run(load_config("fig1", None, ["gamma=0", f"dt={dt}"]), tmp_path)
    with (tmp_path / "fig1_populations.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    return max(abs(float(r["p_excited"]) - 0.5) for r in rows)


def test_fig1_closed_system_is_flat_to_first_order(tmp_path):
    # R = 1 - i H dt is unitary only to first order, so populations drift by O(dt)
    coarse = closed_system_drift(tmp_path / "a", 0.05)
    fine = closed_system_drift(tmp_path / "b", 0.025)
    assert coarse < 0.05
    assert coarse / fine == pytest.approx(2.0, rel=0.05)


def test_worker_pool_does_not_change_output(tmp_path):
    run(load_config("fig5", None, ["workers=1"]), tmp_path / "a")
    run(load_config("fig5", None, ["workers=3"]), tmp_path / "b")
    assert (tmp_path / "a" / "fig5_density.csv").read_bytes() == (tmp_path / "b" / "fig5_density.csv").read_bytes()


def test_fitted_penalty_constant():
    assert fit_penalty(RunConfig(experiment="fig2")) == pytest.approx(FITTED_PENALTY, abs=1e-5)

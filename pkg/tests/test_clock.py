from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from stoclock import clock as ck
from stoclock.errors import (
    DimensionMismatch,
    EmptyEnsemble,
    NonHermitianInput,
    RankMismatch,
    RecipeMismatch,
    SupportOverlap,
    ZeroSlice,
)
from stoclock.linalg import null_space_basis
from stoclock.qcore import TwoLevelParams, pure_state, two_level_model
from stoclock.sse import ForcedJumpStream, RngStream, propagate

NEVER = 10**9


def no_jump(model, grid, psi0, **kw):
    clock = ck.build_nonhermitian_clock(model, grid, psi0, **kw)
    return clock, ck.ground_history(clock)


def same_up_to_phase(a, b):
    ov = np.vdot(a, b)
    return np.linalg.norm(b * (abs(ov) / ov) - a) if abs(ov) > 0 else np.inf


def test_grid():
    g = ck.ClockGrid(1.0, 0.05, 2)
    assert (g.N, g.dim) == (21, 42)
    assert g.slice_weight == pytest.approx(0.05 / 1.05)
    with pytest.raises(ValueError):
        ck.ClockGrid(0.0, 0.05, 2)


def test_unitary_clock_ground_state_is_the_evolution(model, psi0, grid):
    clock = ck.build_unitary_clock(model.h_sys, grid, psi0)
    np.testing.assert_allclose(clock.matrix, clock.matrix.conj().T, atol=0)
    assert np.linalg.eigvalsh(clock.matrix).min() > -1e-12
    eta = ck.ground_history(clock)
    u = sla.expm(-0.05j * model.h_sys)
    psi = psi0.copy()
    for k in range(grid.N):
        assert same_up_to_phase(psi, ck.measure_clock(eta, k)) < 1e-12
        psi = u @ psi
    np.testing.assert_allclose(eta.slice_norms(), np.sqrt(grid.slice_weight), atol=1e-12)


def test_unitary_clock_input_checks(model, psi0, grid):
    with pytest.raises(NonHermitianInput):
        ck.build_unitary_clock(np.array([[0, 1], [0, 0]]), grid, psi0)
    with pytest.raises(DimensionMismatch):
        ck.build_unitary_clock(np.eye(3), grid, psi0)
    with pytest.raises(ValueError):
        ck.build_unitary_clock(model.h_sys, grid, np.array([1.0, 1.0]))


def test_nonhermitian_ground_is_stepped_r(model, psi0, grid):
    clock, eta = no_jump(model, grid, psi0)
    assert np.linalg.norm(clock.matrix @ eta.vector) < 1e-13
    r = np.eye(2) - 0.05j * model.h_sys - 0.05 * model.dissipator_half
    phi = psi0.copy()
    weights = []
    for k in range(grid.N):
        assert same_up_to_phase(phi / np.linalg.norm(phi), ck.measure_clock(eta, k)) < 1e-12
        weights.append(np.linalg.norm(phi) ** 2)
        phi = r @ phi
    # undressed slice weights follow the no-jump survival probability
    np.testing.assert_allclose(eta.slice_norms() ** 2 / eta.slice_norms()[0] ** 2, weights, rtol=1e-11)


def test_first_order_inverse_has_no_exact_zero_mode(model, psi0, grid):
    clock = ck.build_nonhermitian_clock(model, grid, psi0, exact_inverse=False)
    assert np.linalg.svd(clock.matrix, compute_uv=False).min() > 1e-4
    closed = two_level_model(TwoLevelParams(1.0, 0.0))
    clock = ck.build_nonhermitian_clock(closed, grid, psi0, exact_inverse=False)
    # without decay the expansion is R^H and the clock is Hermitian
    np.testing.assert_allclose(clock.matrix, clock.matrix.conj().T, atol=0)


def test_jump_table_matches_sse_probabilities(model, psi0, grid):
    _, eta0 = no_jump(model, grid, psi0)
    table = ck.jump_table_from_history(eta0, model)
    traj = propagate(psi0, model, 1.0, 0.05, ForcedJumpStream(NEVER))
    np.testing.assert_allclose(table.dp, traj.probs.dp, atol=1e-14)
    np.testing.assert_allclose(table.survival, traj.probs.survival, rtol=1e-12)
    assert table.dp.shape == (grid.N, 1)


def test_dressed_clock_has_equal_slice_weights(model, psi0, grid):
    _, eta0 = no_jump(model, grid, psi0)
    table = ck.jump_table_from_history(eta0, model)
    dressed, eta = no_jump(model, grid, psi0, probs=table)
    assert dressed.recipe == ck.NonHermitian(dressed=True)
    np.testing.assert_allclose(eta.slice_norms(), np.sqrt(grid.slice_weight), atol=1e-12)
    assert np.linalg.norm(dressed.matrix @ eta.vector) < 1e-13


def test_no_jump_branch_equals_dressed_clock(model, psi0, grid):
    _, eta0 = no_jump(model, grid, psi0)
    table = ck.jump_table_from_history(eta0, model)
    sampled = ck.sample_single_jump_clock(eta0, table, model, grid, ForcedJumpStream(NEVER), psi0=psi0)
    dressed = ck.build_nonhermitian_clock(model, grid, psi0, probs=table)
    assert sampled.recipe.jump is None
    np.testing.assert_array_equal(sampled.matrix, dressed.matrix)
    default = ck.sample_single_jump_clock(eta0, table, model, grid, ForcedJumpStream(NEVER))
    np.testing.assert_allclose(default.matrix, dressed.matrix, atol=1e-14)


@pytest.fixture
def forced():
    model = two_level_model(TwoLevelParams(1.0, 0.2))
    psi0 = pure_state(1, 1)
    grid = ck.ClockGrid(1.95, 0.05, 2)
    _, eta0 = no_jump(model, grid, psi0)
    table = ck.jump_table_from_history(eta0, model)
    clock = ck.sample_single_jump_clock(eta0, table, model, grid, ForcedJumpStream(20))
    return model, psi0, grid, eta0, clock


def test_forced_single_jump_clock(forced):
    model, psi0, grid, eta0, clock = forced
    assert clock.recipe == ck.SingleJump(((20, 0),))
    assert clock.segments == (0, 20)
    basis = null_space_basis(clock.matrix, 2)
    eta = ck.combine_degenerate(basis, eta0, (20, 0), model)
    traj = propagate(psi0, model, 1.95, 0.05, ForcedJumpStream(20))
    np.testing.assert_allclose(eta.slices() / np.sqrt(grid.slice_weight), traj.states, atol=1e-12)
    # ground_history takes the same route on its own
    np.testing.assert_allclose(ck.ground_history(clock).vector, eta.vector, atol=1e-12)


def test_combine_degenerate_errors(forced):
    model, _, _, eta0, clock = forced
    basis = null_space_basis(clock.matrix, 2)
    with pytest.raises(SupportOverlap):
        ck.combine_degenerate(basis, eta0, (10, 0), model)
    with pytest.raises(RankMismatch):
        ck.combine_degenerate(basis[:1], eta0, (20, 0), model)


def test_exact_stochastic_clock_two_level(model, psi0, grid):
    seen_jump = False
    for sid in range(20):
        clock, traj = ck.sample_exact_stochastic_clock(psi0, model, grid, RngStream(4, sid))
        eta = ck.history_from_states(traj.states, grid)
        assert np.linalg.norm(clock.matrix @ eta.vector) < 1e-12
        assert clock.recipe.jumps == traj.jumps
        seen_jump |= bool(traj.jumps)
    assert seen_jump


def multi_jump_setup():
    # the ground projector keeps jumping after the first collapse
    model = two_level_model(TwoLevelParams(1.0, 4.0), jump="ground_projector")
    psi0 = pure_state(1, 1)
    grid = ck.ClockGrid(1.0, 0.05, 2)
    sid = next(i for i in range(100) if len(propagate(psi0, model, 1.0, 0.05, RngStream(8, i)).jumps) >= 2)
    return model, psi0, grid, sid


def test_multi_jump_clock_matches_trajectory():
    model, psi0, grid, sid = multi_jump_setup()
    clock, traj = ck.sample_exact_stochastic_clock(psi0, model, grid, RngStream(8, sid))
    eta = ck.ground_history(clock)
    for k in range(grid.N):
        assert same_up_to_phase(traj.states[k], ck.measure_clock(eta, k)) < 1e-10
    parts = ck.segment_hamiltonians(clock)
    assert len(parts) == len(traj.jumps) + 1
    np.testing.assert_array_equal(sum(parts), clock.matrix)
    for a in parts:
        for b in parts:
            assert np.abs(a @ b - b @ a).max() == 0.0


def test_recursive_sampler_reproduces_exact_clock():
    model, psi0, grid, _ = multi_jump_setup()
    _, eta0 = no_jump(model, grid, psi0)
    table = ck.jump_table_from_history(eta0, model)
    for sid in range(10):
        sampled = ck.sample_single_jump_clock(
            eta0, table, model, grid, RngStream(8, sid), max_jumps=grid.N, psi0=psi0
        )
        exact, traj = ck.sample_exact_stochastic_clock(psi0, model, grid, RngStream(8, sid))
        assert sampled.recipe.jumps == traj.jumps
        np.testing.assert_allclose(sampled.matrix, exact.matrix, atol=1e-12)


def test_one_jump_closure_stops_after_first_jump():
    model, psi0, grid, sid = multi_jump_setup()
    _, eta0 = no_jump(model, grid, psi0)
    table = ck.jump_table_from_history(eta0, model)
    rng = RngStream(8, sid)
    clock = ck.sample_single_jump_clock(eta0, table, model, grid, rng)
    assert len(clock.recipe.jumps) == 1 and len(clock.segments) == 2
    # every step still consumed its draws
    traj = propagate(psi0, model, 1.0, 0.05, RngStream(8, sid))
    assert rng.counter == grid.N - 1 + len(traj.jumps)


def test_similarity_transform(model, psi0, grid):
    closed = two_level_model(TwoLevelParams(1.0, 0.0))
    clock = ck.build_nonhermitian_clock(closed, grid, psi0)
    np.testing.assert_array_equal(ck.similarity_transform(clock, closed), clock.matrix)
    _, eta0 = no_jump(model, grid, psi0)
    dressed = ck.build_nonhermitian_clock(model, grid, psi0, probs=ck.jump_table_from_history(eta0, model))
    with pytest.raises(RecipeMismatch):
        ck.similarity_transform(dressed, model)


def test_normality_residual(model, psi0, grid):
    closed = two_level_model(TwoLevelParams(1.0, 0.0))
    clock = ck.build_nonhermitian_clock(closed, grid, psi0, exact_inverse=False)
    assert ck.normality_residual(clock, psi0) == (0.0, 0.0)
    full, proj = ck.normality_residual(ck.build_nonhermitian_clock(model, grid, psi0), psi0)
    assert full > proj > 0
    with pytest.raises(RecipeMismatch):
        ck.normality_residual(ck.build_unitary_clock(model.h_sys, grid, psi0), psi0)


def test_spectrum_report(model, psi0, grid, tmp_path):
    rep = ck.spectrum_report(ck.build_unitary_clock(model.h_sys, grid, psi0))
    assert rep.max_imag == 0.0
    assert abs(rep.eigenvalues[0]) < 1e-12 and rep.gap > 0
    assert np.all(np.diff(rep.eigenvalues) >= 0)
    lines = ck.write_spectrum_csv(rep, tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "index,eigenvalue,pair_index,above_band"
    assert len(lines) == grid.dim + 1
    with pytest.raises(ValueError):
        ck.spectrum_report(ck.build_unitary_clock(model.h_sys, grid, psi0), cap=10)


def test_spectrum_pairs_for_single_jump(forced):
    rep = ck.spectrum_report(forced[-1])
    assert len(rep.degenerate_pairs) == forced[-1].dim // 2


def test_gap_scan_single_T(model, psi0):
    rows = ck.gap_scan(model, psi0, [1.0], 0.05)
    assert len(rows) == 1 and rows[0][0] == 1.0 and rows[0][1] > 0


def test_disorder(model, psi0, grid):
    clock, eta = no_jump(model, grid, psi0)
    same = ck.add_disorder(clock, ck.DisorderSpec(0.0, 1))
    np.testing.assert_array_equal(same.matrix, clock.matrix)
    assert isinstance(same.recipe, ck.Disordered)
    # zero disorder: lowest eigenvector is the clean ground state
    assert abs(abs(np.vdot(ck.ground_history(same).vector, eta.vector)) - 1) < 1e-10
    a = ck.add_disorder(clock, ck.DisorderSpec(0.1, 1, 3))
    b = ck.add_disorder(clock, ck.DisorderSpec(0.1, 1, 3))
    c = ck.add_disorder(clock, ck.DisorderSpec(0.1, 1, 4))
    np.testing.assert_array_equal(a.matrix, b.matrix)
    assert not np.array_equal(a.matrix, c.matrix)
    delta = np.diag(a.matrix - clock.matrix).real
    assert delta.min() >= 0 and delta.max() <= 0.1


def test_disordered_segments_are_solved_separately(forced):
    model, psi0, grid, eta0, clock = forced
    noisy = ck.add_disorder(clock, ck.DisorderSpec(1e-6, 5))
    eta = ck.ground_history(noisy)
    np.testing.assert_allclose(eta.slice_norms(), np.sqrt(grid.slice_weight), atol=1e-3)
    traj = propagate(psi0, model, 1.95, 0.05, ForcedJumpStream(20))
    for k in range(grid.N):
        assert same_up_to_phase(traj.states[k], ck.measure_clock(eta, k)) < 1e-3


def test_history_state_helpers(grid, psi0, tmp_path):
    states = np.tile(psi0, (grid.N, 1))
    eta = ck.history_from_states(states, grid)
    np.testing.assert_allclose(ck.ensemble_density_from_clocks([eta, eta], 3), np.full((2, 2), 0.5), atol=1e-15)
    with pytest.raises(EmptyEnsemble):
        ck.ensemble_density_from_clocks([], 0)
    with pytest.raises(IndexError):
        ck.measure_clock(eta, grid.N)
    vec = eta.vector.copy()
    vec[:2] = 0
    with pytest.raises(ZeroSlice):
        ck.measure_clock(ck.HistoryState(vec / np.linalg.norm(vec), grid), 0)
    with pytest.raises(ValueError):
        ck.HistoryState(2 * eta.vector, grid)
    lines = ck.write_history_csv(eta, tmp_path / "h.csv").read_text().splitlines()
    assert lines[0] == "slice,t,re_0,re_1,im_0,im_1,slice_norm"
    assert len(lines) == grid.N + 1


@settings(max_examples=15)
@given(
    st.floats(0.2, 2.0),
    st.floats(0.0, 1.0),
    st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
        lambda t: abs(complex(t[2], t[3])) > 0.05 and abs(complex(t[0], t[1])) > 0.05
    ),
)
def test_clock_spectrum_invariants(omega, gamma, amps):
    model = two_level_model(TwoLevelParams(omega, gamma))
    psi0 = pure_state(complex(amps[0], amps[1]), complex(amps[2], amps[3]))
    grid = ck.ClockGrid(1.0, 0.05, 2)
    clock, eta = no_jump(model, grid, psi0, penalty=6.0)
    assert np.linalg.norm(clock.matrix @ eta.vector) < 1e-8
    rep = ck.spectrum_report(clock)
    assert rep.max_imag <= 1e-6 * (1 + np.abs(rep.eigenvalues).max())
    assert rep.eigenvalues[0] >= -1e-6
    assert len(rep.above_band) == 1

"""Closed-form thresholds, locked-state construction, ring near-solutions,
stability, and the brute-force ring equilibrium search."""

import math

import numpy as np
import pytest

import ringlock as rl

MIX_F_UPPER = 1.8787068501198949        # max of sin(x) + cos(3x), frozen oracle
SHIFT_F_UPPER = 1.0 - 0.5646424733950354
SHIFT_F_LOWER = -1.0 - 0.5646424733950354
SHIFT_RATIO_BOUND = 4.593925401029676   # 1 + (1 + sin 0.6)/(1 - sin 0.6)

CONSTRUCT_TOL = 1e-9
EXACT = 1e-12

COUPLING_TEXTS = ("sin(1)", "sin(1)+cos(3)", "sin(1,phase=0.6)-c", "-sin(1)")


def sine():
    return rl.parse_coupling("sin(1)")


def load(text):
    f = rl.parse_coupling(text)
    return f, rl.profile(f)


def deviations(*sums):
    return rl.cumulative_deviations(rl.from_target_deviations(sums))


# ---------------------------------------------------------------------------
# thresholds and bounds
# ---------------------------------------------------------------------------

def test_chain_threshold_counterexample_shape_is_exactly_one():
    f, prof = load("sin(1)")
    cd = deviations(1.0, -1.0, -1.0)
    assert rl.chain_threshold(prof, cd) == 1.0
    assert rl.ring_upper_bound(prof, cd) == 2.0


def test_chain_threshold_two_oscillators():
    f, prof = load("sin(1)")
    cd = rl.cumulative_deviations(rl.FrequencyVector(values=np.array([1.0, -1.0])))
    assert rl.chain_threshold(prof, cd) == 1.0
    f2, prof2 = load("sin(1)+cos(3)")
    assert abs(rl.chain_threshold(prof2, cd) - MIX_F_UPPER) < EXACT


def test_chain_threshold_uses_the_binding_side():
    _, prof = load("sin(1,phase=0.6)-c")
    up = deviations(1.0)      # only the positive extreme binds
    down = deviations(-1.0)   # only the negative extreme binds
    assert abs(rl.chain_threshold(prof, up) - SHIFT_F_UPPER) < EXACT
    assert abs(rl.chain_threshold(prof, down) - (-SHIFT_F_LOWER)) < EXACT


def test_identical_oscillators_have_infinite_threshold():
    _, prof = load("sin(1)")
    cd = rl.cumulative_deviations(rl.FrequencyVector(values=np.array([0.5, 0.5, 0.5])))
    assert math.isinf(rl.chain_threshold(prof, cd))
    assert math.isinf(rl.ring_upper_bound(prof, cd))


def test_ring_bound_never_below_chain_threshold():
    rng = np.random.default_rng(11)
    for text in COUPLING_TEXTS:
        _, prof = load(text)
        for _ in range(50):
            fv = rl.sample_uniform(int(rng.integers(2, 12)), int(rng.integers(0, 10_000)))
            cd = rl.cumulative_deviations(fv)
            assert rl.ring_upper_bound(prof, cd) >= rl.chain_threshold(prof, cd)


def test_ratio_bound_values_and_floor():
    assert rl.ratio_upper_bound(rl.profile(sine())) == 2.0
    assert rl.ratio_upper_bound(rl.profile(rl.parse_coupling("sin(1)+cos(3)"))) == 2.0
    shifted_bound = rl.ratio_upper_bound(rl.profile(rl.parse_coupling("sin(1,phase=0.6)-c")))
    assert abs(shifted_bound - SHIFT_RATIO_BOUND) < 1e-10
    rng = np.random.default_rng(23)
    for _ in range(25):
        coeffs = rng.uniform(-1, 1, 4)
        f = rl.make_coupling(
            [(1, coeffs[0], coeffs[1]), (2, coeffs[2], coeffs[3])]
        )
        try:
            prof = rl.profile(f)
        except rl.RinglockError:
            continue
        assert rl.ratio_upper_bound(prof) >= 2.0


# ---------------------------------------------------------------------------
# chain locked states
# ---------------------------------------------------------------------------

def test_chain_locked_state_satisfies_defining_equations():
    rng = np.random.default_rng(7)
    for text in COUPLING_TEXTS:
        f, prof = load(text)
        for _ in range(10):
            fv = rl.sample_uniform(int(rng.integers(2, 10)), int(rng.integers(0, 10_000)))
            cd = rl.cumulative_deviations(fv)
            gamma = float(rng.uniform(0.05, 0.95)) * rl.chain_threshold(prof, cd)
            state = rl.chain_locked_state(f, prof, cd, gamma)
            resid = np.abs(rl.evaluate(f, state.phase_diffs) - gamma * cd.sums)
            assert resid.max() < CONSTRUCT_TOL
            assert all(rl.derivative(f, p) > 0 for p in state.phase_diffs)
            assert state.stable
            assert state.topology == "chain" and state.scheme == "telescopic"


def test_chain_locked_state_matches_branch_inversion():
    f, prof = load("sin(1)+cos(3)")
    cd = deviations(0.8, -0.4, 0.2)
    gamma = 0.6
    state = rl.chain_locked_state(f, prof, cd, gamma)
    expected = [rl.invert_rising(prof, f, gamma * d) for d in cd.sums]
    assert np.allclose(state.phase_diffs, expected, atol=EXACT)


def test_chain_locked_state_frequency_frame():
    f, prof = load("sin(1)")
    cd = deviations(1.0, -1.0)
    assert rl.chain_locked_state(f, prof, cd, 0.5).frequency == 0.0
    st = rl.chain_locked_state(f, prof, cd, 0.5, mean_value=0.8)
    assert abs(st.frequency - 0.4) < EXACT


def test_chain_locked_state_raises_at_and_above_threshold():
    f, prof = load("sin(1)")
    cd = deviations(1.0, -1.0, -1.0)
    with pytest.raises(rl.AboveThreshold):
        rl.chain_locked_state(f, prof, cd, 1.0)  # the boundary itself
    with pytest.raises(rl.AboveThreshold):
        rl.chain_locked_state(f, prof, cd, 1.7)
    with pytest.raises(ValueError):
        rl.chain_locked_state(f, prof, cd, -0.1)


def test_chain_locked_state_near_threshold_extreme_diffs():
    f, prof = load("sin(1)")
    cd = deviations(1.0, -1.0, -1.0)
    state = rl.chain_locked_state(f, prof, cd, 1.0 - 1e-6)
    target = np.array([np.pi / 2, -np.pi / 2, -np.pi / 2])
    assert np.abs(state.phase_diffs - target).max() < 5e-3


# ---------------------------------------------------------------------------
# ring near-solutions (telescopic)
# ---------------------------------------------------------------------------

def test_ring_approximation_residual_below_bound():
    rng = np.random.default_rng(31)
    for text in COUPLING_TEXTS:
        f, prof = load(text)
        for n in (4, 8, 16):
            for frac in (0.3, 0.7):
                fv = rl.sample_uniform(n, int(rng.integers(0, 10_000)))
                cd = rl.cumulative_deviations(fv)
                gamma = frac * rl.chain_threshold(prof, cd)
                state = rl.chain_locked_state(f, prof, cd, gamma)
                approx = rl.ring_approximate_state(f, prof, state)
                assert approx.residual.shape == (n - 1,)
                assert float(approx.residual.max()) <= approx.residual_bound
                assert 0.0 <= approx.chain_total < 2 * np.pi


def test_ring_approximation_closes_the_seam_at_a_zero():
    for text in COUPLING_TEXTS:
        f, prof = load(text)
        fv = rl.sample_uniform(9, 12)
        cd = rl.cumulative_deviations(fv)
        gamma = 0.5 * rl.chain_threshold(prof, cd)
        approx = rl.ring_approximate_state(f, prof, rl.chain_locked_state(f, prof, cd, gamma))
        seam_value = rl.evaluate(f, -float(np.sum(approx.phase_diffs)))
        assert abs(seam_value) < 1e-10


def test_ring_approximation_shift_is_uniform():
    f, prof = load("sin(1)")
    cd = deviations(0.5, -0.2, 0.3, 0.1)
    state = rl.chain_locked_state(f, prof, cd, 0.4)
    approx = rl.ring_approximate_state(f, prof, state)
    shifts = state.phase_diffs - approx.phase_diffs
    assert np.abs(shifts - shifts[0]).max() < EXACT
    expected = (approx.rising_zero + approx.chain_total) / (len(cd.sums))
    assert abs(shifts[0] - expected) < EXACT


def test_ring_approximation_rejects_wrong_inputs():
    f, prof = load("sin(1)")
    cd = deviations(0.5, -0.2)
    state = rl.chain_locked_state(f, prof, cd, 0.3)
    ring_state = rl.LockedState(
        phase_diffs=state.phase_diffs, gamma=0.3, frequency=0.0,
        topology="ring", scheme="telescopic", stable=True,
    )
    with pytest.raises(ValueError):
        rl.ring_approximate_state(f, prof, ring_state)


# ---------------------------------------------------------------------------
# linearization and stability
# ---------------------------------------------------------------------------

def test_jacobian_of_flat_chain_is_path_laplacian():
    f = sine()
    state = rl.LockedState(
        phase_diffs=np.zeros(2), gamma=0.0, frequency=0.0,
        topology="chain", scheme="telescopic", stable=True,
    )
    expected = np.array([[-1.0, 1.0, 0.0], [1.0, -2.0, 1.0], [0.0, 1.0, -1.0]])
    assert np.allclose(rl.jacobian_at(state, f), expected, atol=EXACT)


def test_jacobian_of_flat_ring_is_cycle_laplacian():
    f = sine()
    state = rl.LockedState(
        phase_diffs=np.zeros(2), gamma=0.0, frequency=0.0,
        topology="ring", scheme="telescopic", stable=True,
    )
    expected = np.array([[-2.0, 1.0, 1.0], [1.0, -2.0, 1.0], [1.0, 1.0, -2.0]])
    assert np.allclose(rl.jacobian_at(state, f), expected, atol=EXACT)


def test_jacobian_symmetry_and_zero_rows_telescopic():
    # symmetric even when the slope of f is not an even function
    f, prof = load("sin(1,phase=0.6)-c")
    rng = np.random.default_rng(13)
    for topology in ("chain", "ring"):
        for _ in range(10):
            n = int(rng.integers(3, 12))
            phi = rng.uniform(-2.5, 2.5, n - 1)
            state = rl.LockedState(
                phase_diffs=phi, gamma=0.1, frequency=0.0,
                topology=topology, scheme="telescopic", stable=True,
            )
            jac = rl.jacobian_at(state, f)
            assert np.abs(jac - jac.T).max() < EXACT
            assert np.abs(jac.sum(axis=1)).max() < EXACT


def test_jacobian_standard_entries_and_zero_rows():
    f, prof = load("sin(1,phase=0.6)-c")
    phi = np.array([0.4, -0.9, 1.3])
    state = rl.LockedState(
        phase_diffs=phi, gamma=0.1, frequency=0.0,
        topology="chain", scheme="standard", stable=True,
    )
    jac = rl.jacobian_at(state, f)
    for k in range(3):
        assert abs(jac[k, k + 1] - rl.derivative(f, -phi[k])) < EXACT
        assert abs(jac[k + 1, k] - rl.derivative(f, phi[k])) < EXACT
    assert np.abs(jac.sum(axis=1)).max() < EXACT


def test_jacobian_ring_corner_weights():
    f, prof = load("sin(1,phase=0.6)-c")
    phi = np.array([0.7, -0.3])
    seam = -float(np.sum(phi))
    tele = rl.LockedState(
        phase_diffs=phi, gamma=0.1, frequency=0.0,
        topology="ring", scheme="telescopic", stable=True,
    )
    jt = rl.jacobian_at(tele, f)
    assert abs(jt[0, 2] - rl.derivative(f, seam)) < EXACT
    assert abs(jt[2, 0] - rl.derivative(f, seam)) < EXACT
    std = rl.LockedState(
        phase_diffs=phi, gamma=0.1, frequency=0.0,
        topology="ring", scheme="standard", stable=True,
    )
    js = rl.jacobian_at(std, f)
    assert abs(js[0, 2] - rl.derivative(f, seam)) < EXACT
    assert abs(js[2, 0] - rl.derivative(f, -seam)) < EXACT


def test_constructed_states_are_negative_semidefinite_with_one_null_mode():
    rng = np.random.default_rng(37)
    for text in COUPLING_TEXTS:
        f, prof = load(text)
        for n in (3, 6, 12):
            fv = rl.sample_uniform(n, int(rng.integers(0, 10_000)))
            cd = rl.cumulative_deviations(fv)
            gamma = 0.6 * rl.chain_threshold(prof, cd)
            state = rl.chain_locked_state(f, prof, cd, gamma)
            eig = np.linalg.eigvals(rl.jacobian_at(state, f))
            assert eig.real.max() <= rl.ZERO_EIG_TOL
            assert int(np.count_nonzero(np.abs(eig) <= rl.ZERO_EIG_TOL)) == 1
            assert rl.check_stability(state, f)


def test_stability_rejects_falling_branch_state():
    # sin(5*pi/6) = 0.5 solves the equation but sits on a falling branch
    f = sine()
    state = rl.LockedState(
        phase_diffs=np.array([5 * np.pi / 6, np.pi / 6]), gamma=0.5,
        frequency=0.0, topology="chain", scheme="telescopic", stable=True,
    )
    assert not rl.check_stability(state, f)


def test_stability_rejects_degenerate_null_space():
    # zero slope at pi/2 gives a second null eigenvalue
    f = sine()
    state = rl.LockedState(
        phase_diffs=np.array([np.pi / 2]), gamma=1.0, frequency=0.0,
        topology="chain", scheme="telescopic", stable=True,
    )
    assert not rl.check_stability(state, f)


# ---------------------------------------------------------------------------
# standard-scheme constructions
# ---------------------------------------------------------------------------

def test_standard_chain_state_solves_every_equation():
    f, prof = load("sin(1,phase=0.6)-c")
    rng = np.random.default_rng(41)
    for _ in range(8):
        n = int(rng.integers(3, 9))
        fv = rl.sample_uniform(n, int(rng.integers(0, 10_000)))
        gamma = 0.15 * rl.standard_scheme_cap(f, fv)
        state = rl.standard_chain_locked_state(f, prof, fv, gamma)
        resid = gamma * fv.values + rl.standard_coupling_terms(f, state.phase_diffs) - state.frequency
        assert np.abs(resid).max() < 1e-8
        assert state.scheme == "standard"


def test_standard_chain_matches_telescopic_for_odd_coupling():
    f, prof = load("sin(1)")
    rng = np.random.default_rng(43)
    for _ in range(5):
        fv = rl.sample_uniform(int(rng.integers(3, 8)), int(rng.integers(0, 10_000)))
        cd = rl.cumulative_deviations(fv)
        gamma = 0.4 * rl.chain_threshold(prof, cd)
        tele = rl.chain_locked_state(f, prof, cd, gamma)
        std = rl.standard_chain_locked_state(f, prof, fv, gamma)
        assert np.abs(tele.phase_diffs - std.phase_diffs).max() < 1e-8
        assert abs(std.frequency - gamma * fv.values.mean()) < 1e-8


def test_standard_chain_reports_no_solution_above_cap():
    f, prof = load("sin(1,phase=0.6)-c")
    fv = rl.sample_uniform(6, 2)
    with pytest.raises(rl.NoSolution):
        rl.standard_chain_locked_state(f, prof, fv, 1.2 * rl.standard_scheme_cap(f, fv))


def test_standard_ring_approximation_residuals_and_bound():
    f, prof = load("sin(1,phase=0.6)-c")
    rng = np.random.default_rng(47)
    for n in (5, 9, 17):
        fv = rl.sample_uniform(n, int(rng.integers(0, 10_000)))
        gamma = 0.2 * rl.standard_scheme_cap(f, fv)
        chain_state = rl.standard_chain_locked_state(f, prof, fv, gamma)
        approx = rl.ring_standard_approximate_state(f, prof, chain_state)
        assert approx.residual.shape == (n,)  # one residual per oscillator
        assert float(approx.residual.max()) <= approx.residual_bound
        assert approx.rising_zero == 0.0


def test_standard_ring_approximation_seam_zero_at_pi():
    f, prof = load("-sin(1)")
    fv = rl.sample_uniform(7, 3)
    gamma = 0.15 * rl.standard_scheme_cap(f, fv)
    chain_state = rl.standard_chain_locked_state(f, prof, fv, gamma)
    approx = rl.ring_standard_approximate_state(f, prof, chain_state)
    assert approx.rising_zero == np.pi
    assert float(approx.residual.max()) <= approx.residual_bound


def test_standard_ring_approximation_requires_symmetric_zero():
    # sin(x + 0.6) vanishes at neither 0 nor pi
    f, prof = load("sin(1,phase=0.6)")
    fv = rl.sample_uniform(5, 4)
    chain_state = rl.standard_chain_locked_state(f, prof, fv, 0.05)
    with pytest.raises(rl.NoSymmetricZero):
        rl.ring_standard_approximate_state(f, prof, chain_state)


def test_standard_ring_approximation_rejects_telescopic_input():
    f, prof = load("sin(1)")
    cd = deviations(0.5, -0.5)
    state = rl.chain_locked_state(f, prof, cd, 0.3)
    with pytest.raises(ValueError):
        rl.ring_standard_approximate_state(f, prof, state)


# ---------------------------------------------------------------------------
# brute-force ring equilibria
# ---------------------------------------------------------------------------

def test_ring_solution_absent_at_the_chain_threshold():
    cd = deviations(1.0, -1.0, -1.0)
    assert not rl.ring_exact_solution_exists(sine(), cd, 1.0)


def test_ring_solution_present_at_half_width():
    f = sine()
    cd = deviations(1.0, -1.0, -1.0)
    assert rl.ring_exact_solution_exists(f, cd, 0.5)
    phi, res = rl.find_ring_solution(f, cd, 0.5)
    assert phi is not None and res < 1e-8
    seam = rl.evaluate(f, -float(np.sum(phi)))
    check = np.abs(rl.evaluate(f, phi) - seam - 0.5 * cd.sums)
    assert check.max() < 1e-8


def test_ring_solution_trivial_at_zero_width():
    cd = deviations(0.3, -0.6)
    assert rl.ring_exact_solution_exists(sine(), cd, 0.0)


def test_ring_search_dimension_guard():
    cd = rl.cumulative_deviations(rl.sample_uniform(6, 0))  # N-1 = 5
    with pytest.raises(rl.DimensionTooLarge):
        rl.ring_exact_solution_exists(sine(), cd, 0.2)


def test_ring_search_two_oscillators():
    # one unknown: f(x) - f(-x) = gamma * d has a solution iff |gamma| <= 2
    f = sine()
    cd = rl.cumulative_deviations(rl.FrequencyVector(values=np.array([1.0, -1.0])))
    assert rl.ring_exact_solution_exists(f, cd, 1.9)
    assert not rl.ring_exact_solution_exists(f, cd, 2.1)

"""Acceptance gate: one test per shipped claim, at its stated tolerance.

Run `pytest -v tests/test_acceptance.py` for one pass/fail line per
criterion.  Criterion 3 defaults to its reduced profile (10 oscillators,
30 trials per panel); set RINGLOCK_FULL_SCALE=1 to run the full 200-trial
sweep at 25 oscillators, which takes hours.
"""

import math
import os
import time

import numpy as np
import pytest

import ringlock as rl

FULL_SCALE = os.environ.get("RINGLOCK_FULL_SCALE") == "1"


def sine():
    return rl.parse_coupling("sin(1)")


def report(name: str, detail: str) -> None:
    print(f"ACCEPTANCE {name}: PASS ({detail})")


def dynamics_verdict(f, fv, gamma, topology):
    cfg = rl.SystemConfig(
        f=f, fv=fv, gamma=gamma, topology=topology, scheme="telescopic"
    )
    return rl.detect_lock(cfg)


def test_criterion_1_counterexample_exact():
    started = time.monotonic()
    f = sine()
    fv = rl.FrequencyVector(values=np.array([1.0, -2.0, 0.0, 1.0]))
    cd = rl.cumulative_deviations(fv)
    assert np.array_equal(cd.sums, [1.0, -1.0, -1.0])

    cap = rl.chain_threshold(rl.profile(f), cd)
    assert cap == 1.0  # exactly, no tolerance

    assert rl.ring_exact_solution_exists(f, cd, 1.0) is False
    assert not dynamics_verdict(f, fv, 1.0, "ring").locked
    assert dynamics_verdict(f, fv, 0.99, "chain").locked

    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    report(
        "1 exact counterexample",
        f"chain threshold exactly 1.0; no ring equilibrium and no dynamic "
        f"lock at 1.0; chain locks at 0.99; {elapsed:.1f}s",
    )


def test_criterion_2_two_oscillator_ratio():
    started = time.monotonic()
    fv = rl.FrequencyVector(values=np.array([1.0, -1.0]))
    pair = rl.matched_pair(sine(), fv)
    chain_err = abs(pair.chain.estimate - 1.0)
    ring_err = abs(pair.ring.estimate - 2.0)
    assert chain_err <= 0.01   # 1 +/- 1%
    assert ring_err <= 0.02    # 2 +/- 1%

    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    report(
        "2 two-oscillator ratio",
        f"chain {pair.chain.estimate:.5f} (|err| {chain_err:.1e} <= 0.01), "
        f"ring {pair.ring.estimate:.5f} (|err| {ring_err:.1e} <= 0.02); "
        f"{elapsed:.1f}s",
    )


def test_criterion_3_scatter_bound_audit():
    started = time.monotonic()
    n, trials = (25, 200) if FULL_SCALE else (10, 30)
    panels = (
        ("sin(1)", "telescopic"),
        ("sin(1)+cos(3)", "telescopic"),
        ("sin(1,phase=0.6)-c", "telescopic"),
        ("sin(1,phase=0.6)-c", "standard"),
    )
    any_below_one = False
    summaries = []
    for text, scheme in panels:
        result = rl.scatter_experiment(rl.parse_coupling(text), scheme, n, trials, 0)
        over = sum(1 for row in result.rows if row.ratio > result.ratio_bound + 0.05)
        below = sum(1 for row in result.rows if row.ratio < 1.0)
        assert over == 0, (
            f"{text}/{scheme}: {over} trials exceed ratio bound "
            f"{result.ratio_bound} + 0.05 (max ratio {result.max_ratio})"
        )
        any_below_one = any_below_one or below > 0
        summaries.append(f"{text}/{scheme} max {result.max_ratio:.3f} below-1 {below}")
    assert any_below_one, "no panel produced a ring that locks worse than its chain"

    elapsed = time.monotonic() - started
    if not FULL_SCALE:
        assert elapsed < 600.0
    scale = "full" if FULL_SCALE else "reduced"
    report(
        "3 scatter bound audit",
        f"{scale} profile N={n} trials={trials}: zero bound violations, "
        f"ratio<1 observed; {'; '.join(summaries)}; {elapsed:.0f}s",
    )


def test_criterion_4_chain_threshold_accuracy():
    started = time.monotonic()
    texts = ("sin(1)", "sin(1)+cos(3)")
    sizes = (5, 10, 25)
    worst = 0.0
    for i in range(50):
        f = rl.parse_coupling(texts[i % 2])
        prof = rl.profile(f)
        fv = rl.sample_uniform(sizes[i % 3], 1000 + i)
        cd = rl.cumulative_deviations(fv)
        cap = rl.chain_threshold(prof, cd)
        cfg = rl.SystemConfig(
            f=f, fv=fv, gamma=0.0, topology="chain", scheme="telescopic"
        )
        est = rl.bisect_threshold(cfg, 1.05 * cap)
        err = abs(est.estimate - cap) / cap
        worst = max(worst, err)
        assert err < 0.02, f"case {i}: relative error {err}"

    elapsed = time.monotonic() - started
    report(
        "4 chain threshold accuracy",
        f"50 seeded cases (N in 5/10/25, two couplings): worst relative "
        f"error {worst:.2e} < 0.02; {elapsed:.0f}s",
    )


def test_criterion_5_ring_chain_convergence():
    started = time.monotonic()
    result = rl.convergence_experiment(
        rl.parse_coupling("-sin(1)"), 0.5, (8, 16, 32, 64, 128), 0
    )
    assert -1.3 <= result.slope <= -0.7, f"separation slope {result.slope}"
    for row in result.rows:
        assert row.approx_residual <= row.approx_bound, (
            f"N={row.n}: constructed residual {row.approx_residual} violates "
            f"bound {row.approx_bound}"
        )

    elapsed = time.monotonic() - started
    report(
        "5 ring-chain convergence",
        f"separation slope {result.slope:.3f} in [-1.3, -0.7]; residual "
        f"bound held at every N (analytic slope {result.approx_slope:.3f}); "
        f"{elapsed:.0f}s",
    )


def test_criterion_6_property_suites():
    started = time.monotonic()
    rng = np.random.default_rng(2024)
    coupling_texts = ("sin(1)", "sin(1)+cos(3)", "sin(1,phase=0.6)-c", "-sin(1)")

    # (a) branch inversion round trip <= 1e-9
    worst_invert = 0.0
    for text in coupling_texts:
        f = rl.parse_coupling(text)
        prof = rl.profile(f)
        ys = rng.uniform(prof.f_lower, prof.f_upper, 200)
        for y in ys:
            x = rl.invert_rising(prof, f, float(y))
            worst_invert = max(worst_invert, abs(float(rl.evaluate(f, x)) - float(y)))
    assert worst_invert <= 1e-9

    # (b) telescoping mean-velocity identity <= 1e-12
    f = rl.parse_coupling("sin(1)+cos(3)")
    worst_tele = 0.0
    for topology in ("chain", "ring"):
        for _ in range(25):
            n = int(rng.integers(2, 12))
            fv = rl.FrequencyVector(values=rng.uniform(-1, 1, n))
            cfg = rl.SystemConfig(
                f=f, fv=fv, gamma=1.3, topology=topology, scheme="telescopic"
            )
            v = rl.velocity_field(cfg, rl.PhaseState(phases=rng.uniform(-6, 6, n)))
            worst_tele = max(worst_tele, abs(float(np.sum(v - 1.3 * fv.values))))
    assert worst_tele <= 1e-12

    # (c) Jacobian symmetry and zero row sums <= 1e-12
    shifted = rl.parse_coupling("sin(1,phase=0.6)-c")
    worst_sym = worst_rows = 0.0
    for topology in ("chain", "ring"):
        for _ in range(10):
            n = int(rng.integers(3, 12))
            state = rl.LockedState(
                phase_diffs=rng.uniform(-2.5, 2.5, n - 1), gamma=0.1,
                frequency=0.0, topology=topology, scheme="telescopic", stable=True,
            )
            jac = rl.jacobian_at(state, shifted)
            worst_sym = max(worst_sym, float(np.abs(jac - jac.T).max()))
            worst_rows = max(worst_rows, float(np.abs(jac.sum(axis=1)).max()))
    assert worst_sym <= 1e-12 and worst_rows <= 1e-12

    # (d) constructed states: negative semidefinite with one null mode, N <= 12
    checked = 0
    for text in coupling_texts:
        f = rl.parse_coupling(text)
        prof = rl.profile(f)
        for n in range(3, 13):
            fv = rl.sample_uniform(n, 3000 + n)
            cd = rl.cumulative_deviations(fv)
            state = rl.chain_locked_state(f, prof, cd, 0.6 * rl.chain_threshold(prof, cd))
            eig = np.linalg.eigvals(rl.jacobian_at(state, f))
            assert float(eig.real.max()) <= rl.ZERO_EIG_TOL
            assert int(np.count_nonzero(np.abs(eig) <= rl.ZERO_EIG_TOL)) == 1
            checked += 1

    # (e) odd coupling: standard and telescopic trajectories agree to rounding
    f = sine()
    fv = rl.sample_uniform(6, 11)
    worst_scheme = 0.0
    for topology in ("chain", "ring"):
        ends = []
        for scheme in ("telescopic", "standard"):
            cfg = rl.SystemConfig(
                f=f, fv=fv, gamma=0.4, topology=topology, scheme=scheme
            )
            ends.append(rl.integrate(cfg, rl.zero_state(6), 200.0).phases)
        worst_scheme = max(worst_scheme, float(np.abs(ends[0] - ends[1]).max()))
    assert worst_scheme <= 1e-12

    # (f) fixed-step integrator converges at fourth order: factor 16 +/- 3
    drift = rl.FrequencyVector(values=np.array([1.0, -0.3, -0.7]))

    def final(dt):
        cfg = rl.SystemConfig(
            f=f, fv=drift, gamma=1.8, topology="chain", scheme="telescopic", dt=dt
        )
        return rl.integrate(cfg, rl.zero_state(3), 4.0).phases

    ref = final(0.0005)
    errs = [float(np.abs(final(dt) - ref).max()) for dt in (0.2, 0.1, 0.05)]
    factors = [e1 / e2 for e1, e2 in zip(errs, errs[1:])]
    for factor in factors:
        assert 13.0 <= factor <= 19.0

    elapsed = time.monotonic() - started
    assert elapsed < 120.0
    report(
        "6 property suites",
        f"inversion {worst_invert:.1e} <= 1e-9; telescoping {worst_tele:.1e} "
        f"<= 1e-12; Jacobian sym/rows {max(worst_sym, worst_rows):.1e} <= 1e-12; "
        f"{checked} constructed states semidefinite with one null mode; "
        f"scheme equivalence {worst_scheme:.1e}; RK4 factors "
        f"{', '.join(f'{x:.1f}' for x in factors)} in [13, 19]; {elapsed:.0f}s",
    )


def test_criterion_7_standard_coupling_construction():
    started = time.monotonic()
    f = rl.parse_coupling("sin(1,phase=0.6)-c")
    prof = rl.profile(f)
    points = []
    worst_resid = 0.0
    for n in (5, 8, 12, 16, 24, 32):
        fv = rl.sample_uniform(n, 9 + n)
        cd = rl.cumulative_deviations(fv)
        gamma = 0.3 * rl.chain_threshold(prof, cd)
        state = rl.standard_chain_locked_state(f, prof, fv, gamma)
        resid = float(
            np.abs(
                gamma * fv.values
                + rl.standard_coupling_terms(f, state.phase_diffs)
                - state.frequency
            ).max()
        )
        worst_resid = max(worst_resid, resid)
        assert resid < 1e-8, f"N={n}: fixed-point residual {resid}"
        approx = rl.ring_standard_approximate_state(f, prof, state)
        points.append((n, float(approx.residual.max())))
    slope = float(
        np.polyfit(np.log([p[0] for p in points]), np.log([p[1] for p in points]), 1)[0]
    )
    assert -1.3 <= slope <= -0.7, f"ring residual slope {slope}"

    elapsed = time.monotonic() - started
    report(
        "7 standard-coupling construction",
        f"six sizes solved, worst fixed-point residual {worst_resid:.1e} < 1e-8; "
        f"ring residual slope {slope:.3f} in [-1.3, -0.7]; {elapsed:.0f}s",
    )

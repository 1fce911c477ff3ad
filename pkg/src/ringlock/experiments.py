"""End-to-end numerical studies: matched-pair scatter, boundary-condition
convergence, and the exact four-oscillator counterexample.

Each study is a pure function from (coupling, parameters, seed) to a result
object; writing tables is left to the CLI so results stay easy to test.
Reproducibility contract: every trial derives its randomness from the given
seed by a fixed policy (seed + trial index for scatter, seed + N for
convergence), so reruns produce identical rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import (
    chain_locked_state,
    chain_threshold,
    ratio_upper_bound,
    ring_approximate_state,
    ring_exact_solution_exists,
)
from .coupling import CouplingFunction, coupling_to_text, evaluate, parse_coupling, profile
from .dynamics import (
    DEFAULT_DT,
    DEFAULT_LOCK_TOL,
    DEFAULT_OBSERVATION,
    DEFAULT_TRANSIENT,
    PhaseState,
    SystemConfig,
    integrate,
    observe,
    zero_state,
)
from .errors import NotLocked
from .frequencies import (
    FrequencyVector,
    cumulative_deviations,
    from_target_deviations,
    sample_uniform,
)
from .thresholds import DEFAULT_REL_TOL, MatchedPair, matched_pair


def coupling_text(f: CouplingFunction) -> str:
    """Round-trip text for f, or a literal dump when not expressible."""
    try:
        return coupling_to_text(f)
    except ValueError:
        return f"<coupling constant={f.constant!r} harmonics={f.harmonics!r}>"


# ---------------------------------------------------------------------------
# matched-pair scatter
# ---------------------------------------------------------------------------

SCATTER_HEADER = (
    "seed",
    "n",
    "coupling",
    "scheme",
    "chain_empirical",
    "ring_empirical",
    "chain_analytic",
    "ring_bound",
    "ratio",
)


@dataclass(frozen=True)
class ScatterRow:
    seed: int
    n: int
    coupling: str
    scheme: str
    chain_empirical: float
    ring_empirical: float
    chain_analytic: float
    ring_bound: float
    ratio: float

    def as_tuple(self) -> tuple:
        return (
            self.seed,
            self.n,
            self.coupling,
            self.scheme,
            self.chain_empirical,
            self.ring_empirical,
            self.chain_analytic,
            self.ring_bound,
            self.ratio,
        )


@dataclass(frozen=True)
class ScatterResult:
    coupling: str
    scheme: str
    n: int
    trials: int
    seed0: int
    ratio_bound: float
    rows: tuple[ScatterRow, ...]

    @property
    def max_ratio(self) -> float:
        return max(row.ratio for row in self.rows)

    @property
    def fraction_below_one(self) -> float:
        below = sum(1 for row in self.rows if row.ratio < 1.0)
        return below / len(self.rows)


def scatter_experiment(
    f: CouplingFunction,
    scheme: str,
    n: int,
    trials: int,
    seed0: int,
    dt: float = DEFAULT_DT,
    transient_time: float = DEFAULT_TRANSIENT,
    observation_time: float = DEFAULT_OBSERVATION,
    rel_tol: float = DEFAULT_REL_TOL,
    lock_tol: float = DEFAULT_LOCK_TOL,
) -> ScatterResult:
    """Measure ring and chain critical widths for `trials` random draws.

    Trial i draws its frequency shape from seed0 + i, runs the matched pair,
    and records one row; the analytic columns are recomputed per realization
    so the table is self-checking.
    """
    text = coupling_text(f)
    bound = ratio_upper_bound(profile(f))
    rows = []
    for i in range(trials):
        seed = seed0 + i
        fv = sample_uniform(n, seed)
        pair = matched_pair(
            f,
            fv,
            scheme,
            dt=dt,
            transient_time=transient_time,
            observation_time=observation_time,
            rel_tol=rel_tol,
            lock_tol=lock_tol,
        )
        rows.append(_scatter_row(seed, n, text, scheme, pair))
    return ScatterResult(
        coupling=text,
        scheme=scheme,
        n=n,
        trials=trials,
        seed0=seed0,
        ratio_bound=bound,
        rows=tuple(rows),
    )


def _scatter_row(
    seed: int, n: int, text: str, scheme: str, pair: MatchedPair
) -> ScatterRow:
    return ScatterRow(
        seed=seed,
        n=n,
        coupling=text,
        scheme=scheme,
        chain_empirical=pair.chain.estimate,
        ring_empirical=pair.ring.estimate,
        chain_analytic=pair.chain_cap,
        ring_bound=pair.ring_cap,
        ratio=pair.ratio,
    )


# ---------------------------------------------------------------------------
# boundary-condition convergence
# ---------------------------------------------------------------------------

CONVERGENCE_HEADER = (
    "n",
    "gamma",
    "separation",
    "approx_residual",
    "approx_bound",
)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    gamma: float
    separation: float
    approx_residual: float
    approx_bound: float

    def as_tuple(self) -> tuple:
        return (self.n, self.gamma, self.separation, self.approx_residual, self.approx_bound)


@dataclass(frozen=True)
class ConvergenceResult:
    coupling: str
    gamma_fraction: float
    seed: int
    rows: tuple[ConvergenceRow, ...]
    slope: float | None
    approx_slope: float | None


def convergence_experiment(
    f: CouplingFunction,
    gamma_fraction: float,
    n_values: tuple[int, ...] | list[int],
    seed: int,
    dt: float = DEFAULT_DT,
    observation_time: float = 1000.0,
    min_transient: float = DEFAULT_TRANSIENT,
    lock_tol: float = DEFAULT_LOCK_TOL,
) -> ConvergenceResult:
    """Measure how fast the locked ring approaches the locked chain.

    For each N: draw a fresh frequency shape from seed + N, pick the width
    gamma_fraction * chain threshold, integrate the chain from zero phases
    until it locks, then hand the chain's final phases to the ring and let
    it settle.  The recorded separation is the infinity norm between the two
    locked difference vectors; the analytic columns record the constructed
    near-solution's worst residual and its 1/(N-1) bound at the same width.

    The transient grows like 1.5 * N^2 (never below min_transient) because
    the slowest relaxation mode of a locked segment of N oscillators slows
    down quadratically with its length.

    Raises:
        NotLocked: if either topology fails the lock test at some N.
    """
    if not 0.0 < gamma_fraction < 1.0:
        raise ValueError("gamma_fraction must be in (0, 1)")
    if len(n_values) == 0:
        raise ValueError("n_values must not be empty")
    prof = profile(f)
    rows = []
    for n in n_values:
        fv = sample_uniform(int(n), seed + int(n))
        cd = cumulative_deviations(fv)
        cap = chain_threshold(prof, cd)
        if not math.isfinite(cap):
            raise NotLocked("degenerate draw: chain threshold is infinite")
        gamma = gamma_fraction * cap
        transient = max(min_transient, 1.5 * float(n) ** 2)

        def settle(topology: str, start: PhaseState) -> PhaseState:
            cfg = SystemConfig(
                f=f,
                fv=fv,
                gamma=gamma,
                topology=topology,
                scheme="telescopic",
                dt=dt,
                transient_time=transient,
                observation_time=observation_time,
            )
            after = integrate(cfg, start, transient)
            verdict, end = observe(cfg, after, lock_tol=lock_tol)
            if not verdict.locked:
                raise NotLocked(
                    f"{topology} with {n} oscillators failed to lock at width {gamma!r}"
                )
            return end

        chain_end = settle("chain", zero_state(int(n)))
        ring_end = settle("ring", PhaseState(phases=chain_end.phases))
        separation = float(
            np.max(np.abs(chain_end.diffs() - ring_end.diffs()))
        )

        state = chain_locked_state(f, prof, cd, gamma)
        approx = ring_approximate_state(f, prof, state)
        rows.append(
            ConvergenceRow(
                n=int(n),
                gamma=float(gamma),
                separation=separation,
                approx_residual=float(np.max(approx.residual)),
                approx_bound=approx.residual_bound,
            )
        )
    return ConvergenceResult(
        coupling=coupling_text(f),
        gamma_fraction=float(gamma_fraction),
        seed=int(seed),
        rows=tuple(rows),
        slope=_loglog_slope([(r.n, r.separation) for r in rows]),
        approx_slope=_loglog_slope([(r.n, r.approx_residual) for r in rows]),
    )


def _loglog_slope(points: list[tuple[int, float]]) -> float | None:
    usable = [(n, y) for n, y in points if y > 0.0]
    if len(usable) < 2:
        return None
    xs = np.log([n for n, _ in usable])
    ys = np.log([y for _, y in usable])
    return float(np.polyfit(xs, ys, 1)[0])


# ---------------------------------------------------------------------------
# the four-oscillator counterexample
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class CounterexampleReport:
    checks: tuple[CheckOutcome, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def counterexample_experiment(
    dt: float = DEFAULT_DT,
    transient_time: float = DEFAULT_TRANSIENT,
    observation_time: float = DEFAULT_OBSERVATION,
    lock_tol: float = DEFAULT_LOCK_TOL,
) -> CounterexampleReport:
    """Four sine-coupled oscillators whose chain locks but whose ring cannot.

    The frequency shape is built backwards from the cumulative deviations
    (1, -1, -1), giving base frequencies (1, -2, 0, 1).  The chain threshold is exactly
    1; at width 1 the ring's first two telescoped equations subtract to
    sin(a) - sin(b) = 2, which forces a = pi/2 and b = -pi/2 — and at those
    forced phases the first equation itself fails by exactly 1.  The report
    verifies the algebra, the lattice search, and the dynamics all agree.
    """
    f = parse_coupling("sin(1)")
    prof = profile(f)
    fv = from_target_deviations((1.0, -1.0, -1.0))
    cd = cumulative_deviations(fv)
    checks: list[CheckOutcome] = []

    def record(name: str, passed: bool, detail: str) -> None:
        checks.append(CheckOutcome(name=name, passed=bool(passed), detail=detail))

    cap = chain_threshold(prof, cd)
    record(
        "chain_threshold_exact",
        cap == 1.0,
        f"chain threshold = {cap!r} (expected exactly 1.0)",
    )

    gamma_near = 1.0 - 1e-6
    state = chain_locked_state(f, prof, cd, gamma_near)
    target = np.array([np.pi / 2, -np.pi / 2, -np.pi / 2])
    gap = float(np.max(np.abs(state.phase_diffs - target)))
    record(
        "chain_state_near_extreme",
        gap < 5e-3,
        f"max |phase diff - (pi/2, -pi/2, -pi/2)| = {gap!r} at width {gamma_near!r}",
    )

    exists = ring_exact_solution_exists(f, cd, 1.0)
    record(
        "ring_has_no_solution_at_one",
        not exists,
        f"lattice+Newton search found a ring equilibrium: {exists}",
    )

    def locks(topology: str, gamma: float) -> bool:
        cfg = SystemConfig(
            f=f,
            fv=fv,
            gamma=gamma,
            topology=topology,
            scheme="telescopic",
            dt=dt,
            transient_time=transient_time,
            observation_time=observation_time,
        )
        after = integrate(cfg, zero_state(cfg.n), transient_time)
        verdict, _ = observe(cfg, after, lock_tol=lock_tol)
        return verdict.locked

    ring_at_one = locks("ring", 1.0)
    record(
        "ring_does_not_lock_at_one",
        not ring_at_one,
        f"ring lock verdict at width 1.0: {ring_at_one}",
    )

    forced = target
    seam = float(evaluate(f, -float(np.sum(forced))))
    lhs = float(evaluate(f, forced[0])) - seam
    defect = float(abs(lhs - 1.0 * cd.sums[0]))
    record(
        "forced_phases_contradict",
        abs(lhs) < 1e-12 and abs(defect - 1.0) < 1e-12,
        "sin(a)-sin(b)=2 forces diffs (pi/2, -pi/2); first ring equation "
        f"then gives {lhs!r} instead of 1.0 (defect {defect!r})",
    )

    chain_below = locks("chain", 0.99)
    record(
        "chain_locks_just_below",
        chain_below,
        f"chain lock verdict at width 0.99: {chain_below}",
    )

    chain_half = locks("chain", 0.5)
    ring_half = locks("ring", 0.5)
    record(
        "both_lock_at_half",
        chain_half and ring_half,
        f"lock verdicts at width 0.5: chain={chain_half}, ring={ring_half}",
    )

    return CounterexampleReport(checks=tuple(checks))

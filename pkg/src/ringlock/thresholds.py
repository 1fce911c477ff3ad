"""Empirical critical widths by bisection on the lock detector.

The analytic caps guarantee that no locked state survives 5% above them, so
[0, 1.05 * cap] is always a valid bisection bracket: the bottom locks (zero
width from zero phases), the top cannot.  Each probe integrates the full
transient from the all-zero initial condition, making the whole procedure
deterministic.  The result is a bracket, not a point: the midpoint is the
conventional single-number estimate.

Because each probe resolves trajectory locking rather than equilibrium
existence, estimates inherit the detector's slack; near the true critical
width the transient slows down (the ghost of the disappearing equilibrium),
which biases estimates slightly low for a fixed transient time.  The
transient is exposed as a parameter for exactly that reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .analytic import chain_threshold, ring_upper_bound
from .coupling import CouplingFunction, profile
from .dynamics import (
    DEFAULT_DT,
    DEFAULT_LOCK_TOL,
    DEFAULT_OBSERVATION,
    DEFAULT_TRANSIENT,
    SystemConfig,
    detect_lock,
)
from .errors import BadBracket, NotApplicable
from .frequencies import FrequencyVector, cumulative_deviations

DEFAULT_REL_TOL = 1e-3
BRACKET_MARGIN = 1.05


@dataclass(frozen=True)
class ThresholdEstimate:
    """Converged bisection bracket around an empirical critical width.

    Attributes:
        gamma_low: largest width that locked (starts at 0, which locks by
            construction from zero phases).
        gamma_high: smallest width that failed to lock.
        iterations: number of lock probes performed, bracket check included.
        trace: every (gamma, locked) verdict in probe order.
    """

    gamma_low: float
    gamma_high: float
    iterations: int
    trace: tuple[tuple[float, bool], ...]

    @property
    def estimate(self) -> float:
        """Midpoint of the converged bracket."""
        return 0.5 * (self.gamma_low + self.gamma_high)

    @property
    def relative_width(self) -> float:
        return (self.gamma_high - self.gamma_low) / self.gamma_high


@dataclass(frozen=True)
class MatchedPair:
    """Chain and ring estimates for one frequency realization.

    chain_cap and ring_cap record the analytic caps the brackets were built
    from (the exact chain threshold and the ring upper bound for the
    telescopic scheme; the coarse range bound for the standard scheme).
    """

    chain: ThresholdEstimate
    ring: ThresholdEstimate
    ratio: float
    chain_cap: float
    ring_cap: float


def bisect_threshold(
    cfg: SystemConfig,
    bracket_high: float,
    rel_tol: float = DEFAULT_REL_TOL,
    lock_tol: float = DEFAULT_LOCK_TOL,
) -> ThresholdEstimate:
    """Bisect the width gamma between locking and not locking.

    cfg serves as a template; every probe reuses its coupling, frequency
    shape, topology, scheme, and integration parameters with only gamma
    replaced, integrating from the all-zero state.  Bisection stops when
    (gamma_high - gamma_low)/gamma_high < rel_tol.

    Raises:
        NotApplicable: if bracket_high is not finite (identical oscillators
            lock at every width; there is no threshold to find).
        BadBracket: if the system still locks at bracket_high.
    """
    if not math.isfinite(bracket_high):
        raise NotApplicable(
            "analytic cap is infinite; every width locks and no threshold exists"
        )
    if bracket_high <= 0.0:
        raise ValueError("bracket_high must be positive")
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must be in (0, 1)")

    def probe(gamma: float) -> bool:
        verdict = detect_lock(
            replace(cfg, gamma=gamma), lock_tol=lock_tol, early_exit=True
        )
        return verdict.locked

    trace: list[tuple[float, bool]] = []
    top_locked = probe(bracket_high)
    trace.append((bracket_high, top_locked))
    if top_locked:
        raise BadBracket(
            f"system still locks at bracket top {bracket_high!r}; "
            "raise the bracket or the transient time"
        )
    low, high = 0.0, float(bracket_high)
    while (high - low) / high >= rel_tol:
        mid = 0.5 * (low + high)
        locked = probe(mid)
        trace.append((mid, locked))
        if locked:
            low = mid
        else:
            high = mid
    return ThresholdEstimate(
        gamma_low=low, gamma_high=high, iterations=len(trace), trace=tuple(trace)
    )


def standard_scheme_cap(f: CouplingFunction, fv: FrequencyVector) -> float:
    """Width cap for the standard scheme on either topology.

    In any locked state each oscillator's frequency offset is a sum of at
    most two coupling values, so gamma times the spread of the shape vector
    can never exceed twice the range of f.
    """
    prof = profile(f)
    spread = float(np.max(fv.values) - np.min(fv.values))
    if spread == 0.0:
        return math.inf
    return 2.0 * (prof.f_upper - prof.f_lower) / spread


def analytic_caps(
    f: CouplingFunction, fv: FrequencyVector, scheme: str
) -> tuple[float, float]:
    """(chain cap, ring cap) used to build bisection brackets."""
    if scheme == "telescopic":
        prof = profile(f)
        cd = cumulative_deviations(fv)
        return chain_threshold(prof, cd), ring_upper_bound(prof, cd)
    if scheme == "standard":
        cap = standard_scheme_cap(f, fv)
        return cap, cap
    raise ValueError(f"unknown scheme {scheme!r}")


def matched_pair(
    f: CouplingFunction,
    fv: FrequencyVector,
    scheme: str = "telescopic",
    dt: float = DEFAULT_DT,
    transient_time: float = DEFAULT_TRANSIENT,
    observation_time: float = DEFAULT_OBSERVATION,
    rel_tol: float = DEFAULT_REL_TOL,
    lock_tol: float = DEFAULT_LOCK_TOL,
) -> MatchedPair:
    """Estimate chain and ring critical widths for the same realization.

    Both topologies share f, the frequency shape, the zero initial state,
    and all integration parameters, so the ratio ring/chain is meaningful
    trial by trial.
    """
    chain_cap, ring_cap = analytic_caps(f, fv, scheme)

    def run(topology: str, cap: float) -> ThresholdEstimate:
        cfg = SystemConfig(
            f=f,
            fv=fv,
            gamma=0.0,
            topology=topology,
            scheme=scheme,
            dt=dt,
            transient_time=transient_time,
            observation_time=observation_time,
        )
        return bisect_threshold(
            cfg, BRACKET_MARGIN * cap, rel_tol=rel_tol, lock_tol=lock_tol
        )

    chain_est = run("chain", chain_cap)
    ring_est = run("ring", ring_cap)
    ratio = ring_est.estimate / chain_est.estimate
    return MatchedPair(
        chain=chain_est,
        ring=ring_est,
        ratio=ratio,
        chain_cap=chain_cap,
        ring_cap=ring_cap,
    )

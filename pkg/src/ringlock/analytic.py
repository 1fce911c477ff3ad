"""Analytic locking thresholds, locked-state construction, and stability.

For a telescopically coupled chain, a locked state exists exactly when every
cumulative deviation load gamma * sums[k] fits inside the open value range of
the coupling function; inverting f on its rising branches then produces a
state that is asymptotically stable because every linearization weight is
positive.  The chain threshold is therefore explicit.  For rings only an
upper bound is explicit, and the ratio of ring to chain threshold is bounded
by a shape constant of f that is never below 2.

Rings admit a systematic near-solution: shift every chain phase difference
by the constant that makes the accumulated differences close up at a zero of
f.  The leftover residual shrinks like 1/(N-1), with the prefactor bounded
by the maximum slope of f.  The same shift works for the standard coupling
scheme provided f has a rising zero at 0 or pi, where f is equal at the zero
and its negation.

Everything here is pure computation on profiles, deviation data, and locked
states; no time integration is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .coupling import (
    CouplingFunction,
    CouplingProfile,
    derivative,
    evaluate,
    invert_rising,
    preimages,
)
from .errors import (
    AboveThreshold,
    DimensionTooLarge,
    NoSolution,
    NoSymmetricZero,
    RinglockError,
)
from .frequencies import CumulativeDeviations, FrequencyVector

TWO_PI = 2.0 * np.pi

#: residual below which a numerically polished equilibrium counts as exact
EXACT_RESIDUAL_TOL = 1e-8

#: eigenvalue tolerance for the stability verdict
ZERO_EIG_TOL = 1e-8


@dataclass(frozen=True)
class LockedState:
    """A phase-locked equilibrium, stored as consecutive phase differences.

    Attributes:
        phase_diffs: length N-1 vector of theta[k] - theta[k+1].
        gamma: the frequency-spread width the state was built for.
        frequency: the common locked frequency.  States built from deviation
            data alone are expressed in the co-moving frame where the mean
            natural frequency is zero.
        topology: "chain" or "ring".
        scheme: "standard" or "telescopic".
        stable: eigenvalue-based stability verdict (see check_stability).
    """

    phase_diffs: np.ndarray
    gamma: float
    frequency: float
    topology: str
    scheme: str
    stable: bool

    @property
    def n(self) -> int:
        return int(self.phase_diffs.size) + 1

    def seam_diff(self) -> float:
        """theta[N-1] - theta[0], the phase difference across a ring's seam."""
        return float(-np.sum(self.phase_diffs))


@dataclass(frozen=True)
class RingApproximation:
    """The shifted chain state proposed as a near-solution on the ring.

    Attributes:
        phase_diffs: the shifted differences.
        chain_total: the chain state's total phase difference mod 2*pi,
            in [0, 2*pi).
        rising_zero: the zero of f the seam was closed at.
        residual: absolute residuals of the ring locking equations (one per
            telescoped equation for the telescopic scheme; one per oscillator
            equation for the standard scheme).
        residual_bound: max_abs_slope * |chain_total + rising_zero| / (N-1).
    """

    phase_diffs: np.ndarray
    chain_total: float
    rising_zero: float
    residual: np.ndarray
    residual_bound: float


# ---------------------------------------------------------------------------
# thresholds and bounds
# ---------------------------------------------------------------------------

def _capped_ratio(value: float, dev: float) -> float:
    """value/dev with the convention that a zero deviation means no constraint."""
    return math.inf if dev == 0.0 else value / dev


def chain_threshold(prof: CouplingProfile, cd: CumulativeDeviations) -> float:
    """The exact critical width for a telescopically coupled chain.

    Below this width a stable locked state exists; at or above it no
    equilibrium exists at all.  Infinite when both deviation extremes vanish
    (all oscillators identical).
    """
    return min(
        _capped_ratio(prof.f_upper, cd.upper),
        _capped_ratio(prof.f_lower, cd.lower),
    )


def ring_upper_bound(prof: CouplingProfile, cd: CumulativeDeviations) -> float:
    """An upper bound on the ring's critical width (not attained in general)."""
    width = prof.f_upper - prof.f_lower
    return min(
        _capped_ratio(width, cd.upper),
        _capped_ratio(-width, cd.lower),
    )


def ratio_upper_bound(prof: CouplingProfile) -> float:
    """Bound on ring/chain threshold ratio; depends only on f, never below 2."""
    r = abs(prof.f_lower / prof.f_upper)
    return 1.0 + max(r, 1.0 / r)


# ---------------------------------------------------------------------------
# telescopic constructions
# ---------------------------------------------------------------------------

def chain_locked_state(
    f: CouplingFunction,
    prof: CouplingProfile,
    cd: CumulativeDeviations,
    gamma: float,
    mean_value: float = 0.0,
) -> LockedState:
    """Construct the stable telescopic-chain locked state at width gamma.

    Each phase difference is the rising-branch inverse of its cumulative
    deviation load, so every linearization weight is positive.  The common
    frequency is gamma * mean_value; pass the mean of the frequency shape to
    express the state in absolute terms, or leave the default for the
    co-moving frame.

    Raises:
        AboveThreshold: if gamma >= chain_threshold (at the threshold itself
            the required inverse sits at a closed-branch endpoint, which the
            open rising branches exclude).
    """
    if gamma < 0.0:
        raise ValueError("gamma must be >= 0")
    cap = chain_threshold(prof, cd)
    if gamma >= cap:
        raise AboveThreshold(f"width {gamma!r} is not below the chain threshold {cap!r}")
    phi = np.array([invert_rising(prof, f, gamma * float(d)) for d in cd.sums])
    state = LockedState(
        phase_diffs=phi,
        gamma=float(gamma),
        frequency=float(gamma * mean_value),
        topology="chain",
        scheme="telescopic",
        stable=True,
    )
    return replace(state, stable=check_stability(state, f))


def ring_approximate_state(
    f: CouplingFunction, prof: CouplingProfile, chain_state: LockedState
) -> RingApproximation:
    """Shift a telescopic chain state into a near-solution for the ring.

    The shift (rising_zero + chain_total)/(N-1) makes the seam difference
    land on a zero of f, so the seam term drops out and each telescoped ring
    equation inherits a residual bounded by the mean-value estimate
    max_abs_slope * |shift|.
    """
    if chain_state.topology != "chain" or chain_state.scheme != "telescopic":
        raise ValueError("expected a telescopic chain state")
    phi_c = chain_state.phase_diffs
    n = chain_state.n
    psi = float(np.sum(phi_c)) % TWO_PI
    x0 = prof.rising_zero
    shift = (x0 + psi) / (n - 1)
    phi_r = phi_c - shift

    closure = float(evaluate(f, -float(np.sum(phi_r))))
    if abs(closure) > 1e-8:
        raise RinglockError(
            "seam term failed to vanish; the input is not a valid chain state"
        )
    targets = evaluate(f, phi_c)  # equals gamma * sums for a valid chain state
    residual = np.abs(evaluate(f, phi_r) - closure - targets)
    bound = prof.max_abs_slope * abs(psi + x0) / (n - 1)
    return RingApproximation(
        phase_diffs=phi_r,
        chain_total=psi,
        rising_zero=x0,
        residual=residual,
        residual_bound=float(bound),
    )


# ---------------------------------------------------------------------------
# linearization and stability
# ---------------------------------------------------------------------------

def jacobian_at(state: LockedState, f: CouplingFunction) -> np.ndarray:
    """Jacobian of the phase velocity field at a locked state.

    Assembled edge by edge: the pair (k, k+1) contributes the slope of f at
    the phase difference seen from each side.  For the telescopic scheme both
    sides see the same slope, so the matrix is a symmetric weighted graph
    Laplacian with flipped sign; the standard scheme evaluates the slope at
    the negated difference on both sides and is symmetric only for odd f.
    Rings add the seam pair.  Every row sums to zero because a uniform phase
    shift is neutral.
    """
    phi = np.asarray(state.phase_diffs, dtype=float)
    n = phi.size + 1
    standard = state.scheme == "standard"
    jac = np.zeros((n, n))

    def couple(i: int, j: int, diff: float, left: bool) -> None:
        # Term in oscillator i's equation from neighbor j (diff = theta_i -
        # theta_j): a left neighbor always enters as +f(theta_j - theta_i);
        # a right neighbor enters as -f(theta_i - theta_j) telescopically
        # but as +f(theta_j - theta_i) in the standard scheme.
        if standard or left:
            w = derivative(f, -diff)
        else:
            w = derivative(f, diff)
        jac[i, j] += w
        jac[i, i] -= w

    for k in range(n - 1):
        couple(k, k + 1, float(phi[k]), left=False)   # k looking right
        couple(k + 1, k, -float(phi[k]), left=True)   # k+1 looking left
    if state.topology == "ring":
        seam = state.seam_diff()                      # theta[n-1] - theta[0]
        couple(n - 1, 0, seam, left=False)            # last's right neighbor
        couple(0, n - 1, -seam, left=True)            # first's left neighbor
    return jac


def check_stability(state: LockedState, f: CouplingFunction) -> bool:
    """Eigenvalue test: no eigenvalue in the right half plane beyond
    tolerance, and exactly one eigenvalue at zero (the uniform shift)."""
    eig = np.linalg.eigvals(jacobian_at(state, f))
    if np.any(eig.real > ZERO_EIG_TOL):
        return False
    return int(np.count_nonzero(np.abs(eig) <= ZERO_EIG_TOL)) == 1


# ---------------------------------------------------------------------------
# standard-coupling constructions
# ---------------------------------------------------------------------------

def _wrap(x: float) -> float:
    """Wrap into (-pi, pi]."""
    y = (x + np.pi) % TWO_PI - np.pi
    return np.pi if y == -np.pi else y


def standard_coupling_terms(f: CouplingFunction, diffs: np.ndarray) -> np.ndarray:
    """Per-oscillator coupling sums for a standard-scheme chain.

    Entry k is what oscillator k receives from its neighbors:
    f(-diffs[0]) at the left end, f(diffs[k-1]) + f(-diffs[k]) inside, and
    f(diffs[-1]) at the right end.
    """
    diffs = np.asarray(diffs, dtype=float)
    n = diffs.size + 1
    terms = np.empty(n)
    left = evaluate(f, diffs)      # f(diffs[k-1]) felt by oscillator k
    right = evaluate(f, -diffs)    # f(-diffs[k]) felt by oscillator k
    terms[0] = right[0] if n > 1 else 0.0
    if n > 2:
        terms[1:-1] = left[:-1] + right[1:]
    terms[-1] = left[-1]
    return terms


def standard_ring_coupling_terms(f: CouplingFunction, diffs: np.ndarray) -> np.ndarray:
    """Per-oscillator coupling sums for a standard-scheme ring."""
    diffs = np.asarray(diffs, dtype=float)
    terms = standard_coupling_terms(f, diffs)
    total = float(np.sum(diffs))
    terms[0] += float(evaluate(f, -total))   # seam seen by the first oscillator
    terms[-1] += float(evaluate(f, total))   # seam seen by the last oscillator
    return terms


def standard_chain_locked_state(
    f: CouplingFunction,
    prof: CouplingProfile,
    fv: FrequencyVector,
    gamma: float,
    scan_points: int = 2001,
) -> LockedState:
    """Search for a locked state of the standard-coupling chain.

    The fixed-point system is triangular once the common frequency is fixed:
    each equation determines the coupling value at the negated next phase
    difference from the previous one, and the last equation closes the
    telescope.  The common frequency is found by scanning a bracket that
    provably contains every locked frequency, bisecting each sign change of
    the closure residual.  At each recursion step the preimage with rising
    slope at the difference (and at its negation, when possible) is
    preferred, which favors stable states.

    The search is deterministic but greedy: it follows one preimage branch
    per step and does not backtrack, so a root the scan brackets is found,
    while exotic solutions that require mixed branch choices may be missed.

    Raises:
        NoSolution: if no scanned frequency closes the recursion with all
            equation residuals below 1e-8.
    """
    if gamma < 0.0:
        raise ValueError("gamma must be >= 0")
    if scan_points < 16:
        raise ValueError("scan_points too small")
    omega = gamma * fv.values
    n = omega.size
    pad = abs(prof.f_lower) + abs(prof.f_upper)
    lo = float(omega.min()) - pad
    hi = float(omega.max()) + pad

    slope_tol = 1e-10 * max(1.0, prof.max_abs_slope)

    def recursion(common: float):
        """Phase differences and closure residual at a trial frequency.

        Returns None when some required coupling value leaves the open range
        of f, which means no state with this frequency exists on any branch
        this recursion explores.
        """
        phi = np.empty(n - 1)
        prev = 0.0
        for k in range(n - 1):
            v = common - omega[k] - prev
            if not (prof.f_lower < v < prof.f_upper):
                return None
            cands = preimages(f, v)
            if not cands:
                return None
            best_key = None
            best_phi = 0.0
            for u in cands:
                p = _wrap(-u)
                rising_here = derivative(f, p) > slope_tol
                rising_pair = rising_here and derivative(f, u) > slope_tol
                key = (not rising_pair, not rising_here, p)
                if best_key is None or key < best_key:
                    best_key = key
                    best_phi = p
            phi[k] = best_phi
            prev = float(evaluate(f, best_phi))
        return phi, prev - (common - omega[-1])

    def closure(common: float):
        got = recursion(common)
        return None if got is None else got[1]

    grid = np.linspace(lo, hi, scan_points)
    vals = [closure(x) for x in grid]
    roots: list[float] = []
    for i in range(len(grid)):
        if vals[i] is not None and vals[i] == 0.0:
            roots.append(float(grid[i]))
        if i == 0 or vals[i] is None or vals[i - 1] is None:
            continue
        if vals[i - 1] * vals[i] < 0.0:
            a, b = float(grid[i - 1]), float(grid[i])
            ca = vals[i - 1]
            hole = False
            for _ in range(100):
                mid = 0.5 * (a + b)
                cm = closure(mid)
                if cm is None:
                    hole = True
                    break
                if cm == 0.0:
                    a = b = mid
                    break
                if ca * cm < 0.0:
                    b = mid
                else:
                    a, ca = mid, cm
                if b - a <= 1e-13 * max(1.0, abs(mid)):
                    break
            if not hole:
                roots.append(0.5 * (a + b))

    for common in roots:
        got = recursion(common)
        if got is None:
            continue
        phi, _ = got
        residuals = omega + standard_coupling_terms(f, phi) - common
        if float(np.max(np.abs(residuals))) < EXACT_RESIDUAL_TOL:
            state = LockedState(
                phase_diffs=phi,
                gamma=float(gamma),
                frequency=float(common),
                topology="chain",
                scheme="standard",
                stable=True,
            )
            return replace(state, stable=check_stability(state, f))
    raise NoSolution(
        "no common frequency in the scan range closes the standard-chain recursion"
    )


def ring_standard_approximate_state(
    f: CouplingFunction, prof: CouplingProfile, chain_state: LockedState
) -> RingApproximation:
    """Shift a standard-coupling chain state into a near-solution on the ring.

    The standard scheme needs the seam to close at a zero x0 of f where
    f(x0) = f(-x0) = 0, because the two seam oscillators see the seam
    difference with opposite signs; only x0 = 0 or pi (mod 2*pi) qualifies.
    The natural frequencies are reconstructed from the chain equations, so
    the reported residuals are exactly the ring equation defects.  One
    residual per oscillator equation (length N).

    Raises:
        NoSymmetricZero: if neither 0 nor pi is a rising zero of f.
    """
    if chain_state.topology != "chain" or chain_state.scheme != "standard":
        raise ValueError("expected a standard-coupling chain state")
    x0 = None
    for cand in (0.0, float(np.pi)):
        if abs(float(evaluate(f, cand))) <= 1e-9 and derivative(f, cand) > 1e-9:
            x0 = cand
            break
    if x0 is None:
        raise NoSymmetricZero("neither 0 nor pi is a rising zero of f")

    phi_c = chain_state.phase_diffs
    n = chain_state.n
    common = chain_state.frequency
    psi = float(np.sum(phi_c)) % TWO_PI
    shift = (x0 + psi) / (n - 1)
    phi_r = phi_c - shift

    omega = common - standard_coupling_terms(f, phi_c)
    residual = np.abs(omega + standard_ring_coupling_terms(f, phi_r) - common)
    # two shifted coupling terms per equation, so twice the one-term bound
    bound = 2.0 * prof.max_abs_slope * abs(psi + x0) / (n - 1)
    return RingApproximation(
        phase_diffs=phi_r,
        chain_total=psi,
        rising_zero=float(x0),
        residual=residual,
        residual_bound=float(bound),
    )


# ---------------------------------------------------------------------------
# exact ring equilibria by brute force (small N)
# ---------------------------------------------------------------------------

def _ring_residuals(f: CouplingFunction, phi: np.ndarray, targets: np.ndarray) -> np.ndarray:
    seam = float(evaluate(f, -float(np.sum(phi))))
    return evaluate(f, phi) - seam - targets


def _polish_ring(f: CouplingFunction, targets: np.ndarray, start: np.ndarray):
    """Damped Newton iteration on the telescoped ring system."""
    x = np.array(start, dtype=float)
    g = _ring_residuals(f, x, targets)
    r = float(np.max(np.abs(g)))
    for _ in range(60):
        if r < 1e-12:
            break
        seam_slope = float(derivative(f, -float(np.sum(x))))
        jac = np.diag(derivative(f, x)) + seam_slope
        try:
            step = np.linalg.solve(jac, g)
        except np.linalg.LinAlgError:
            break
        improved = False
        scale = 1.0
        for _ in range(8):
            x_new = x - scale * step
            g_new = _ring_residuals(f, x_new, targets)
            r_new = float(np.max(np.abs(g_new)))
            if r_new < r:
                x, g, r = x_new, g_new, r_new
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    wrapped = np.array([_wrap(v) for v in x])
    if float(np.max(np.abs(_ring_residuals(f, wrapped, targets)))) <= r + 1e-12:
        x = wrapped
    return x, float(np.max(np.abs(_ring_residuals(f, x, targets))))


def find_ring_solution(
    f: CouplingFunction,
    cd: CumulativeDeviations,
    gamma: float,
    grid_size: int = 200,
) -> tuple[np.ndarray | None, float]:
    """Brute-force search for an exact ring equilibrium.

    Scans a uniform lattice over (-pi, pi]^(N-1), keeps the most promising
    points, and polishes them with damped Newton.  Returns the best solution
    found and its residual; the solution slot is None when nothing reached
    the exactness tolerance.

    Raises:
        DimensionTooLarge: if N-1 > 4, where the lattice is infeasible.
    """
    d = int(cd.sums.size)
    if d > 4:
        raise DimensionTooLarge(f"lattice search limited to N-1 <= 4, got {d}")
    if grid_size < 8:
        raise ValueError("grid_size too small")
    targets = gamma * cd.sums
    xs = _lattice(grid_size)
    fx = np.asarray(evaluate(f, xs))

    seeds: list[tuple[float, tuple[float, ...]]] = []
    per_slice = 3 if d <= 3 else 1

    if d == 1:
        resid = np.abs(fx - np.asarray(evaluate(f, -xs)) - targets[0])
        order = np.argsort(resid)[: 8 * per_slice]
        seeds = [(float(resid[i]), (float(xs[i]),)) for i in order]
    else:
        outer_shape = (grid_size,) * (d - 2)
        for idx in np.ndindex(outer_shape):
            head = [xs[i] for i in idx]
            base = float(np.sum(head)) if head else 0.0
            total = base + xs[:, None] + xs[None, :]
            seam = np.asarray(evaluate(f, -total))
            resid = np.abs(fx[:, None] - seam - targets[d - 2])
            np.maximum(resid, np.abs(fx[None, :] - seam - targets[d - 1]), out=resid)
            for j, val in enumerate(head):
                np.maximum(resid, np.abs(float(fx[idx[j]]) - seam - targets[j]), out=resid)
            flat = np.argsort(resid, axis=None)[:per_slice]
            for pos in flat:
                a, b = np.unravel_index(pos, resid.shape)
                seeds.append(
                    (float(resid[a, b]), tuple(float(v) for v in head) + (float(xs[a]), float(xs[b])))
                )

    seeds.sort(key=lambda item: item[0])
    best_phi = None
    best_res = math.inf
    for _, point in seeds[:512]:
        phi, res = _polish_ring(f, targets, np.array(point))
        if res < best_res:
            best_res = res
            best_phi = phi
        if best_res < EXACT_RESIDUAL_TOL:
            break
    if best_phi is not None and best_res < EXACT_RESIDUAL_TOL:
        return best_phi, best_res
    return None, best_res


def ring_exact_solution_exists(
    f: CouplingFunction,
    cd: CumulativeDeviations,
    gamma: float,
    grid_size: int = 200,
) -> bool:
    """True iff the lattice-plus-Newton search finds an exact ring equilibrium."""
    phi, _ = find_ring_solution(f, cd, gamma, grid_size=grid_size)
    return phi is not None


def _lattice(grid_size: int) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, grid_size + 1)[1:]

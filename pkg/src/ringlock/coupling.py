"""Coupling functions and their analytic profiles.

A coupling function is a finite trigonometric polynomial

    f(x) = constant + sum_n [ cos_coeff_n * cos(n x) + sin_coeff_n * sin(n x) ]

so it is 2*pi-periodic and smooth.  Everything the locking theory needs from
f is collected into a :class:`CouplingProfile`: the extreme values, the
largest absolute slope, the leftmost zero with positive slope, and the
ordered list of rising branches (maximal open intervals where f' > 0) whose
images jointly cover the full value range.  Inverting f on those branches is
what turns target coupling loads into phase differences with guaranteed
local stability.

Profiles are computed by a dense grid scan over (-pi, pi] followed by
bracketed root refinement, so results are deterministic for a given grid
size.  The default grid is fine enough for the modest harmonic orders this
package is used with; raise ``grid_size`` for exotic, rapidly oscillating
functions.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConstantFunction,
    CouplingParseError,
    NoPositiveSlopeZero,
    NoZeroCrossing,
    OutOfRange,
    RinglockError,
)

DEFAULT_GRID_SIZE = 100_000

# Bracket width for refined roots, and the relative tolerance used when
# deciding whether a zero of f has a genuinely positive slope.
_ROOT_XTOL = 1e-13
_SLOPE_REL_TOL = 1e-8


@dataclass(frozen=True)
class Harmonic:
    """One trigonometric term: cos_coeff*cos(order*x) + sin_coeff*sin(order*x)."""

    order: int
    cos_coeff: float = 0.0
    sin_coeff: float = 0.0


@dataclass(frozen=True)
class CouplingFunction:
    """A finite trigonometric polynomial used as the pairwise coupling."""

    harmonics: tuple[Harmonic, ...]
    constant: float = 0.0

    def __post_init__(self) -> None:
        for h in self.harmonics:
            if h.order < 1:
                raise ValueError(f"harmonic order must be >= 1, got {h.order}")

    @property
    def is_constant(self) -> bool:
        return all(h.cos_coeff == 0.0 and h.sin_coeff == 0.0 for h in self.harmonics)


def make_coupling(terms: Iterable[tuple[int, float, float]], constant: float = 0.0) -> CouplingFunction:
    """Build a CouplingFunction from (order, cos_coeff, sin_coeff) triples.

    Terms with the same order are merged; orders are sorted ascending so that
    equal functions compare (and hash) equal.
    """
    acc: dict[int, list[float]] = {}
    for order, ccos, csin in terms:
        cur = acc.setdefault(int(order), [0.0, 0.0])
        cur[0] += float(ccos)
        cur[1] += float(csin)
    harmonics = tuple(Harmonic(n, acc[n][0], acc[n][1]) for n in sorted(acc))
    return CouplingFunction(harmonics=harmonics, constant=float(constant))


def evaluate(f: CouplingFunction, x):
    """Evaluate f at x (scalar or ndarray)."""
    x = np.asarray(x, dtype=float)
    acc = np.full_like(x, f.constant, dtype=float)
    for h in f.harmonics:
        nx = h.order * x
        if h.cos_coeff != 0.0:
            acc += h.cos_coeff * np.cos(nx)
        if h.sin_coeff != 0.0:
            acc += h.sin_coeff * np.sin(nx)
    return acc if acc.ndim else float(acc)


def derivative(f: CouplingFunction, x, n: int = 1):
    """Evaluate the n-th derivative of f at x (scalar or ndarray)."""
    if n < 1:
        raise ValueError("derivative order must be >= 1")
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x, dtype=float)
    # Each differentiation maps (a cos + b sin) -> order * (b cos - a sin).
    for h in f.harmonics:
        a, b = h.cos_coeff, h.sin_coeff
        for _ in range(n):
            a, b = h.order * b, -h.order * a
        nx = h.order * x
        if a != 0.0:
            acc += a * np.cos(nx)
        if b != 0.0:
            acc += b * np.sin(nx)
    return acc if acc.ndim else float(acc)


# ---------------------------------------------------------------------------
# text form
# ---------------------------------------------------------------------------

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TERM_RE = re.compile(
    rf"(?P<sign>[+-]?)(?:(?P<coeff>{_NUM})\*)?(?P<func>sin|cos)"
    rf"\((?P<order>\d+)(?:,phase=(?P<phase>{_NUM}))?\)"
)


def parse_coupling(text: str) -> CouplingFunction:
    """Parse the compact text form of a coupling function.

    Grammar (whitespace ignored)::

        spec  := ['-'] term (('+'|'-') term)* ['-c']
        term  := [number '*'] ('sin'|'cos') '(' order [',phase=' number] ')'

    ``sin(n, phase=p)`` means sin(n*x + p), and likewise for cos.  A trailing
    ``-c`` subtracts f(0) so the result vanishes at the origin.  Examples:
    ``sin(1)``, ``sin(1)+cos(3)``, ``sin(1,phase=0.6)-c``, ``-sin(1)``.
    """
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise CouplingParseError("empty coupling spec")
    subtract_f0 = False
    if compact.endswith("-c"):
        subtract_f0 = True
        compact = compact[:-2]
    if not compact:
        raise CouplingParseError(f"no terms in coupling spec {text!r}")

    terms: list[tuple[int, float, float]] = []
    pos = 0
    first = True
    while pos < len(compact):
        m = _TERM_RE.match(compact, pos)
        if not m:
            raise CouplingParseError(f"cannot parse coupling spec {text!r} at {compact[pos:]!r}")
        sign_txt = m.group("sign")
        if not first and sign_txt == "":
            raise CouplingParseError(f"missing '+' or '-' before term in {text!r}")
        sign = -1.0 if sign_txt == "-" else 1.0
        coeff = sign * (float(m.group("coeff")) if m.group("coeff") else 1.0)
        order = int(m.group("order"))
        if order < 1:
            raise CouplingParseError(f"harmonic order must be >= 1 in {text!r}")
        phase = float(m.group("phase")) if m.group("phase") else 0.0
        # sin(nx + p) = sin(p) cos(nx) + cos(p) sin(nx)
        # cos(nx + p) = cos(p) cos(nx) - sin(p) sin(nx)
        if m.group("func") == "sin":
            terms.append((order, coeff * math.sin(phase), coeff * math.cos(phase)))
        else:
            terms.append((order, coeff * math.cos(phase), -coeff * math.sin(phase)))
        pos = m.end()
        first = False

    f = make_coupling(terms)
    if subtract_f0:
        f = CouplingFunction(f.harmonics, constant=f.constant - evaluate(f, 0.0))
    return f


def coupling_to_text(f: CouplingFunction) -> str:
    """Render a CouplingFunction in a parseable compact text form."""
    parts: list[str] = []

    def add(coeff: float, func: str, order: int) -> None:
        if coeff == 0.0:
            return
        sign = "-" if coeff < 0 else ("+" if parts else "")
        mag = abs(coeff)
        body = f"{func}({order})" if mag == 1.0 else f"{mag!r}*{func}({order})"
        parts.append(f"{sign}{body}")

    for h in f.harmonics:
        add(h.sin_coeff, "sin", h.order)
        add(h.cos_coeff, "cos", h.order)
    if not parts:
        return "0"
    text = "".join(parts)
    if f.constant != 0.0:
        # The grammar has no bare-constant term; the only constant this
        # package produces is the '-c' normalization, which subtracts f(0).
        base_at_zero = evaluate(CouplingFunction(f.harmonics, 0.0), 0.0)
        if abs(f.constant + base_at_zero) > 1e-12 * max(1.0, abs(f.constant)):
            raise ValueError("constant term is not expressible in the text form")
        text += "-c"
    return text


# ---------------------------------------------------------------------------
# profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingProfile:
    """Range, slope, and rising-branch data extracted from a coupling function.

    Attributes:
        f_upper: maximum value of f.
        f_lower: minimum value of f.
        max_abs_slope: maximum of |f'|.
        rising_zero: leftmost x in (-pi, pi] with f(x) = 0 and f'(x) > 0.
        rising_branches: ordered open intervals (a, b) in (-pi, pi] on which
            f' > 0, trimmed to the minimal prefix whose images cover
            (f_lower, f_upper).
    """

    f_upper: float
    f_lower: float
    max_abs_slope: float
    rising_zero: float
    rising_branches: tuple[tuple[float, float], ...]


def _grid(grid_size: int) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, grid_size + 1)[1:]


_SEAM_TOL = 1e-9


def _refine_roots(func, xs: np.ndarray, vals: np.ndarray) -> list[float]:
    """Roots of a periodic scalar function bracketed by grid sign changes.

    Also checks the wrap interval (pi, pi + h] so roots near the domain seam
    are not lost.  Roots that land within a hair of -pi are represented at
    +pi instead: the domain is right-closed, so the seam point belongs to the
    +pi side.
    """
    roots: list[float] = []
    n = len(xs)
    for i in range(n - 1):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0.0:
            roots.append(float(brentq(func, a, b, xtol=_ROOT_XTOL)))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    # wrap pair: (xs[-1], xs[0] + 2*pi); the shifted root lies in
    # [-pi, -pi + h] and the seam remap below owns the -pi endpoint
    fa, fb = vals[-1], vals[0]
    if fa * fb < 0.0:
        r = float(brentq(func, xs[-1], xs[0] + 2 * np.pi, xtol=_ROOT_XTOL)) - 2 * np.pi
        roots.append(r)
    roots = [np.pi if r <= -np.pi + _SEAM_TOL else r for r in roots]
    roots.sort()
    # merge near-duplicates (exact zeros on grid points, seam remapping)
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 10 * _ROOT_XTOL:
            merged.append(r)
    return merged


def _coverage_ok(images: Sequence[tuple[float, float]], lo: float, hi: float, tol: float) -> bool:
    if not images:
        return False
    ivs = sorted(images)
    cur = lo
    for a, b in ivs:
        if a > cur + tol:
            return False
        cur = max(cur, b)
        if cur >= hi - tol:
            return True
    return cur >= hi - tol


@functools.lru_cache(maxsize=64)
def profile(f: CouplingFunction, grid_size: int = DEFAULT_GRID_SIZE) -> CouplingProfile:
    """Compute the CouplingProfile of f.

    Raises:
        ConstantFunction: if every harmonic coefficient is zero.
        NoZeroCrossing: if f never takes both signs.
        NoPositiveSlopeZero: if f crosses zero only with vanishing slope.
    """
    if f.is_constant:
        raise ConstantFunction("coupling function has no nonzero harmonic")
    if grid_size < 16:
        raise ValueError("grid_size too small")

    xs = _grid(grid_size)
    fv = evaluate(f, xs)
    fpv = derivative(f, xs, 1)
    fppv = derivative(f, xs, 2)

    crit = _refine_roots(lambda x: derivative(f, x, 1), xs, fpv)
    if not crit:
        raise RinglockError("no critical points found; increase grid_size")

    cand = np.concatenate([fv, evaluate(f, np.array(crit))])
    f_upper = float(np.max(cand))
    f_lower = float(np.min(cand))

    slope_crit = _refine_roots(lambda x: derivative(f, x, 2), xs, fppv)
    slope_cand = np.concatenate([np.abs(fpv), np.abs(derivative(f, np.array(slope_crit), 1))]) \
        if slope_crit else np.abs(fpv)
    max_abs_slope = float(np.max(slope_cand))

    if f_lower >= 0.0 or f_upper <= 0.0:
        raise NoZeroCrossing(
            f"coupling range [{f_lower:.6g}, {f_upper:.6g}] does not straddle zero"
        )

    # rising branches: intervals between consecutive critical points where f' > 0
    pts = [-np.pi] + crit + [np.pi]
    branches: list[tuple[float, float]] = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 10 * _ROOT_XTOL:
            continue
        if derivative(f, 0.5 * (a + b), 1) > 0.0:
            branches.append((float(a), float(b)))

    tol = 1e-9 * max(1.0, f_upper - f_lower)
    images = [(float(evaluate(f, a)), float(evaluate(f, b))) for a, b in branches]
    keep = len(branches)
    for k in range(1, len(branches) + 1):
        if _coverage_ok(images[:k], f_lower, f_upper, tol):
            keep = k
            break
    else:
        raise RinglockError("rising branches fail to cover the value range")
    branches = branches[:keep]

    # zeros of f with strictly positive slope; leftmost one
    zeros = _refine_roots(lambda x: evaluate(f, x), xs, fv)
    slope_tol = _SLOPE_REL_TOL * max_abs_slope
    rising_zeros = [z for z in zeros if derivative(f, z, 1) > slope_tol]
    if not rising_zeros:
        raise NoPositiveSlopeZero(
            "every zero of the coupling function has vanishing or negative slope"
        )

    return CouplingProfile(
        f_upper=f_upper,
        f_lower=f_lower,
        max_abs_slope=max_abs_slope,
        rising_zero=float(rising_zeros[0]),
        rising_branches=tuple(branches),
    )


def invert_rising(prof: CouplingProfile, f: CouplingFunction, y: float) -> float:
    """Invert f on its rising branches.

    Returns the unique x in the first (leftmost) rising branch whose image
    contains y, so f(x) = y and f'(x) > 0.  Deterministic for a fixed
    profile.

    Raises:
        OutOfRange: if y is not strictly inside (f_lower, f_upper), or falls
            exactly on a branch-boundary value none of the open images reach.
    """
    if not (prof.f_lower < y < prof.f_upper):
        raise OutOfRange(
            f"target {y!r} outside the open range ({prof.f_lower!r}, {prof.f_upper!r})"
        )
    for a, b in prof.rising_branches:
        fa = float(evaluate(f, a))
        fb = float(evaluate(f, b))
        if fa < y < fb:
            return float(brentq(lambda x: evaluate(f, x) - y, a, b, xtol=1e-14))
    raise OutOfRange(f"target {y!r} falls in a gap between rising-branch images")


# ---------------------------------------------------------------------------
# monotone decomposition (used for preimage enumeration elsewhere)
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def monotone_segments(
    f: CouplingFunction, grid_size: int = DEFAULT_GRID_SIZE
) -> tuple[tuple[float, float, bool], ...]:
    """Split (-pi, pi] into maximal segments where f is strictly monotone.

    Returns (a, b, rising) triples ordered left to right.
    """
    if f.is_constant:
        raise ConstantFunction("coupling function has no nonzero harmonic")
    xs = _grid(grid_size)
    fpv = derivative(f, xs, 1)
    crit = _refine_roots(lambda x: derivative(f, x, 1), xs, fpv)
    if not crit:
        raise RinglockError("no critical points found; increase grid_size")
    pts = [-np.pi] + crit + [np.pi]
    segments: list[tuple[float, float, bool]] = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 10 * _ROOT_XTOL:
            continue
        segments.append((float(a), float(b), bool(derivative(f, 0.5 * (a + b), 1) > 0.0)))
    return tuple(segments)


def preimages(f: CouplingFunction, y: float, grid_size: int = DEFAULT_GRID_SIZE) -> list[float]:
    """All x in (-pi, pi] with f(x) = y, found segment by segment.

    Only transversal preimages strictly inside a monotone segment are
    reported; values equal to a local extremum of f are not resolved.
    """
    out: list[float] = []
    for a, b, rising in monotone_segments(f, grid_size):
        fa = float(evaluate(f, a))
        fb = float(evaluate(f, b))
        lo, hi = (fa, fb) if rising else (fb, fa)
        if lo < y < hi:
            out.append(float(brentq(lambda x: evaluate(f, x) - y, a, b, xtol=1e-14)))
    return sorted(out)

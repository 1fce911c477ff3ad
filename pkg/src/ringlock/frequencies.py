"""Natural-frequency vectors and their cumulative deviations.

Oscillator k has natural frequency gamma * values[k], where ``values`` is a
fixed shape vector and gamma scales its overall width.  What locking actually
depends on is the running sums of the mean-centered shape,

    sums[k] = sum_{j<=k} (values[j] - mean(values)),   k = 1 .. N-1,

together with their positive and negative extremes.  Random shapes are drawn
i.i.d. uniform on [-1, 1] from numpy's default PCG64 generator, so a 64-bit
seed reproduces a draw exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FrequencyVector:
    """A frequency shape vector plus the seed that produced it, if any."""

    values: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("frequency vector must be 1-d with at least 2 entries")
        if not np.all(np.isfinite(values)):
            raise ValueError("frequency vector must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class CumulativeDeviations:
    """Running sums of a mean-centered shape vector and their extremes.

    Attributes:
        sums: the N-1 running sums (the N-th always vanishes and is dropped).
        upper: max(0, max(sums)).
        lower: min(0, min(sums)).
    """

    sums: np.ndarray
    upper: float
    lower: float


def sample_uniform(n: int, seed: int) -> FrequencyVector:
    """Draw n i.i.d. uniform[-1, 1] frequency entries from a seeded generator."""
    if n < 2:
        raise ValueError(f"need at least 2 oscillators, got {n}")
    rng = np.random.default_rng(seed)
    return FrequencyVector(values=rng.uniform(-1.0, 1.0, size=n), seed=seed)


def cumulative_deviations(fv: FrequencyVector) -> CumulativeDeviations:
    """Running sums of the mean-centered shape, with their extremes."""
    centered = fv.values - fv.values.mean()
    sums = np.cumsum(centered)[:-1]
    return CumulativeDeviations(
        sums=sums,
        upper=float(max(0.0, sums.max())),
        lower=float(min(0.0, sums.min())),
    )


def from_target_deviations(sums) -> FrequencyVector:
    """Build the zero-mean shape vector whose running sums equal ``sums``.

    The inverse of :func:`cumulative_deviations` restricted to zero-mean
    shapes: values[0] = sums[0], values[k] = sums[k] - sums[k-1] for interior
    k, and values[N-1] = -sums[N-2] closes the telescope.
    """
    sums = np.asarray(sums, dtype=float)
    if sums.ndim != 1 or sums.size < 1:
        raise ValueError("need at least one target deviation")
    values = np.empty(sums.size + 1)
    values[0] = sums[0]
    values[1:-1] = np.diff(sums)
    values[-1] = -sums[-1]
    return FrequencyVector(values=values, seed=None)


def save_frequencies(fv: FrequencyVector, path) -> None:
    """Write a frequency vector as single-column text, full precision."""
    np.savetxt(path, fv.values, fmt="%.17g")


def load_frequencies(path) -> FrequencyVector:
    """Read a single-column text file as a frequency vector."""
    values = np.atleast_1d(np.loadtxt(path, dtype=float))
    return FrequencyVector(values=values, seed=None)

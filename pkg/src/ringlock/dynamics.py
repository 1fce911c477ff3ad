"""Time integration of coupled phase oscillators and lock detection.

The state is the vector of raw phases; nothing is wrapped modulo 2*pi, so
trajectories are smooth and phase differences can be compared across time.
Integration is classical RK4 with a fixed step, with one shortened final
step so a run lands exactly on the requested duration.

A system counts as locked over an observation window when every oscillator's
instantaneous velocity stays within a tolerance of the instantaneous mean
velocity, and every consecutive phase difference drifts by less than the
same tolerance.  Both statistics are measured by re-evaluating the velocity
field at states sampled every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .coupling import CouplingFunction
from .errors import NonFiniteState
from .frequencies import FrequencyVector

TOPOLOGIES = ("chain", "ring")
SCHEMES = ("standard", "telescopic")

DEFAULT_DT = 0.125
DEFAULT_TRANSIENT = 2000.0
DEFAULT_OBSERVATION = 500.0
DEFAULT_LOCK_TOL = 1e-3

# remainders smaller than this fraction of dt are rounding noise, not a step
_REMAINDER_EPS = 1e-9


@dataclass(frozen=True)
class SystemConfig:
    """Everything needed to integrate one system.

    Attributes:
        f: coupling function.
        fv: frequency shape vector (natural frequencies are gamma * fv.values).
        gamma: frequency-spread width, >= 0.
        topology: "chain" or "ring".
        scheme: "standard" or "telescopic".
        dt: RK4 step.
        transient_time: settling time integrated before observation.
        observation_time: length of the lock-detection window.
    """

    f: CouplingFunction
    fv: FrequencyVector
    gamma: float
    topology: str
    scheme: str = "telescopic"
    dt: float = DEFAULT_DT
    transient_time: float = DEFAULT_TRANSIENT
    observation_time: float = DEFAULT_OBSERVATION

    def __post_init__(self) -> None:
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (self.gamma >= 0.0):
            raise ValueError("gamma must be >= 0")
        if not (self.dt > 0.0):
            raise ValueError("dt must be > 0")
        if self.transient_time < 0.0 or self.observation_time < 0.0:
            raise ValueError("times must be >= 0")

    @property
    def n(self) -> int:
        return len(self.fv)


@dataclass(frozen=True)
class PhaseState:
    """Raw phases at one instant."""

    phases: np.ndarray
    time: float = 0.0

    def diffs(self) -> np.ndarray:
        """Consecutive phase differences phases[k] - phases[k+1]."""
        return self.phases[:-1] - self.phases[1:]


@dataclass(frozen=True)
class LockVerdict:
    """Outcome of observing one system over a window.

    Attributes:
        locked: True iff both lock statistics stayed below tolerance.
        max_frequency_spread: max over the window of max_k of the deviation
            of oscillator k's velocity from the mean observed frequency.
        mean_frequency: the mean observed frequency over the window.
        max_phase_drift: largest range swept by any consecutive phase
            difference over the window.
    """

    locked: bool
    max_frequency_spread: float
    mean_frequency: float
    max_phase_drift: float


def zero_state(n: int) -> PhaseState:
    """The default initial condition: all phases zero at time zero."""
    return PhaseState(phases=np.zeros(n), time=0.0)


_PACKED_CACHE: dict[CouplingFunction, tuple[np.ndarray, np.ndarray, np.ndarray, float]] = {}


def _packed(f: CouplingFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    got = _PACKED_CACHE.get(f)
    if got is None:
        orders = np.array([h.order for h in f.harmonics], dtype=np.float64)
        cc = np.array([h.cos_coeff for h in f.harmonics], dtype=np.float64)
        cs = np.array([h.sin_coeff for h in f.harmonics], dtype=np.float64)
        got = (orders, cc, cs, float(f.constant))
        if len(_PACKED_CACHE) < 256:
            _PACKED_CACHE[f] = got
    return got


def velocity_field(cfg: SystemConfig, state: PhaseState) -> np.ndarray:
    """Instantaneous phase velocities at a state."""
    theta = np.asarray(state.phases, dtype=float)
    if theta.shape != (cfg.n,):
        raise ValueError(f"state has {theta.shape} phases, config expects {cfg.n}")
    orders, cc, cs, c0 = _packed(cfg.f)
    out = np.empty(cfg.n)
    _kernels.velocity(orders, cc, cs, c0, cfg.gamma * cfg.fv.values, theta,
                      cfg.topology == "ring", cfg.scheme == "standard", out)
    return out


def _split_duration(duration: float, dt: float) -> tuple[int, float]:
    if duration < 0.0:
        raise ValueError("duration must be >= 0")
    n_full = int(np.floor(duration / dt + _REMAINDER_EPS))
    rem = duration - n_full * dt
    if rem <= _REMAINDER_EPS * dt:
        rem = 0.0
    return n_full, rem


def integrate(cfg: SystemConfig, state: PhaseState, duration: float) -> PhaseState:
    """Advance a state by ``duration`` with fixed-step RK4.

    The final step is shortened so the returned state sits exactly at
    state.time + duration.  Raises NonFiniteState if any phase stops being
    finite (for a bounded coupling this can only happen when the input state
    is already corrupt).
    """
    theta = np.array(state.phases, dtype=float)
    if theta.shape != (cfg.n,):
        raise ValueError(f"state has {theta.shape} phases, config expects {cfg.n}")
    if not np.all(np.isfinite(theta)):
        raise NonFiniteState("initial state contains non-finite phases")
    orders, cc, cs, c0 = _packed(cfg.f)
    omega = cfg.gamma * cfg.fv.values
    is_ring = cfg.topology == "ring"
    is_std = cfg.scheme == "standard"
    n_full, rem = _split_duration(duration, cfg.dt)
    if n_full:
        status = _kernels.rk4_steps(orders, cc, cs, c0, omega, theta, is_ring, is_std,
                                    cfg.dt, n_full)
        if status:
            raise NonFiniteState(f"phases went non-finite within {n_full} steps")
    if rem:
        status = _kernels.rk4_steps(orders, cc, cs, c0, omega, theta, is_ring, is_std,
                                    rem, 1)
        if status:
            raise NonFiniteState("phases went non-finite in the final partial step")
    return PhaseState(phases=theta, time=state.time + duration)


def integrate_trace(
    cfg: SystemConfig, state: PhaseState, duration: float, sample_every: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Like integrate, but record (times, phases) every ``sample_every`` steps.

    Returns an array of sample times and a matrix with one phase row per
    sample, starting with the initial state.  The trailing partial step, if
    any, is always recorded.
    """
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    theta = np.array(state.phases, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise NonFiniteState("initial state contains non-finite phases")
    orders, cc, cs, c0 = _packed(cfg.f)
    omega = cfg.gamma * cfg.fv.values
    is_ring = cfg.topology == "ring"
    is_std = cfg.scheme == "standard"
    n_full, rem = _split_duration(duration, cfg.dt)
    times = [state.time]
    rows = [theta.copy()]
    done = 0
    while done < n_full:
        chunk = min(sample_every, n_full - done)
        if _kernels.rk4_steps(orders, cc, cs, c0, omega, theta, is_ring, is_std,
                              cfg.dt, chunk):
            raise NonFiniteState("phases went non-finite during trace")
        done += chunk
        times.append(state.time + done * cfg.dt)
        rows.append(theta.copy())
    if rem:
        if _kernels.rk4_steps(orders, cc, cs, c0, omega, theta, is_ring, is_std, rem, 1):
            raise NonFiniteState("phases went non-finite in the final partial step")
        times.append(state.time + duration)
        rows.append(theta.copy())
    return np.array(times), np.array(rows)


def observe(
    cfg: SystemConfig,
    state: PhaseState,
    lock_tol: float = DEFAULT_LOCK_TOL,
    early_exit: bool = False,
) -> tuple[LockVerdict, PhaseState]:
    """Run the lock-detection window from ``state`` and return the verdict.

    The window covers cfg.observation_time, sampled every cfg.dt.  With
    early_exit=True the window is abandoned as soon as the verdict is
    decided negative; the reported statistics then cover only the part
    actually observed (the verdict itself is unaffected).

    Returns the verdict and the state where observation stopped.
    """
    theta = np.array(state.phases, dtype=float)
    if theta.shape != (cfg.n,):
        raise ValueError(f"state has {theta.shape} phases, config expects {cfg.n}")
    if not np.all(np.isfinite(theta)):
        raise NonFiniteState("initial state contains non-finite phases")
    orders, cc, cs, c0 = _packed(cfg.f)
    nsteps = int(np.ceil(cfg.observation_time / cfg.dt - _REMAINDER_EPS))
    status, spread, drift, freq_mean, vmin, vmax, steps_done = _kernels.observe_window(
        orders, cc, cs, c0, cfg.gamma * cfg.fv.values, theta,
        cfg.topology == "ring", cfg.scheme == "standard", cfg.dt, nsteps,
        lock_tol if early_exit else 0.0,
    )
    if status == 1:
        raise NonFiniteState("phases went non-finite during observation")
    locked = status == 0 and spread < lock_tol and drift < lock_tol
    reported = float(np.max(np.maximum(np.abs(vmax - freq_mean), np.abs(vmin - freq_mean))))
    verdict = LockVerdict(
        locked=bool(locked),
        max_frequency_spread=reported,
        mean_frequency=float(freq_mean),
        max_phase_drift=float(drift),
    )
    return verdict, PhaseState(phases=theta, time=state.time + steps_done * cfg.dt)


def detect_lock(
    cfg: SystemConfig,
    state: PhaseState | None = None,
    lock_tol: float = DEFAULT_LOCK_TOL,
    early_exit: bool = False,
) -> LockVerdict:
    """Integrate the transient, then observe; report whether the system locks.

    Starts from all-zero phases unless an explicit state is given.
    """
    if state is None:
        state = zero_state(cfg.n)
    settled = integrate(cfg, state, cfg.transient_time)
    verdict, _ = observe(cfg, settled, lock_tol=lock_tol, early_exit=early_exit)
    return verdict

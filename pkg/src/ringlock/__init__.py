"""Phase-locking thresholds for rings and chains of coupled phase oscillators.

The package answers four questions about a one-dimensional array of phase
oscillators with trigonometric-polynomial coupling and quenched random
natural frequencies:

* exactly how wide the frequency spread may be before an open chain stops
  locking (closed form),
* how much a ring can gain or lose by closing the loop (sharp bounds and a
  four-oscillator case where the ring is strictly worse),
* what the locked states look like (explicit construction for chains, an
  O(1/N) near-solution for rings, linear stability for both), and
* whether fixed-step simulation agrees (lock detection, bisection for
  empirical thresholds, and three reproducible batch experiments).

Most callers need only ``parse_coupling``, ``profile``, ``sample_uniform``,
``cumulative_deviations``, the threshold functions, and ``detect_lock``.
"""

from .analytic import (
    EXACT_RESIDUAL_TOL,
    LockedState,
    RingApproximation,
    ZERO_EIG_TOL,
    chain_locked_state,
    chain_threshold,
    check_stability,
    find_ring_solution,
    jacobian_at,
    ratio_upper_bound,
    ring_approximate_state,
    ring_exact_solution_exists,
    ring_standard_approximate_state,
    ring_upper_bound,
    standard_chain_locked_state,
    standard_coupling_terms,
    standard_ring_coupling_terms,
)
from .coupling import (
    CouplingFunction,
    CouplingProfile,
    DEFAULT_GRID_SIZE,
    Harmonic,
    coupling_to_text,
    derivative,
    evaluate,
    invert_rising,
    make_coupling,
    monotone_segments,
    parse_coupling,
    preimages,
    profile,
)
from .dynamics import (
    DEFAULT_DT,
    DEFAULT_LOCK_TOL,
    DEFAULT_OBSERVATION,
    DEFAULT_TRANSIENT,
    LockVerdict,
    PhaseState,
    SystemConfig,
    detect_lock,
    integrate,
    integrate_trace,
    observe,
    velocity_field,
    zero_state,
)
from .errors import (
    AboveThreshold,
    BadBracket,
    ConstantFunction,
    CouplingParseError,
    DimensionTooLarge,
    NoPositiveSlopeZero,
    NoSolution,
    NoSymmetricZero,
    NoZeroCrossing,
    NonFiniteState,
    NotApplicable,
    NotLocked,
    OutOfRange,
    RinglockError,
)
from .experiments import (
    CONVERGENCE_HEADER,
    CheckOutcome,
    ConvergenceResult,
    ConvergenceRow,
    CounterexampleReport,
    SCATTER_HEADER,
    ScatterResult,
    ScatterRow,
    convergence_experiment,
    counterexample_experiment,
    coupling_text,
    scatter_experiment,
)
from .frequencies import (
    CumulativeDeviations,
    FrequencyVector,
    cumulative_deviations,
    from_target_deviations,
    load_frequencies,
    sample_uniform,
    save_frequencies,
)
from .output import (
    format_value,
    gnuplot_convergence,
    gnuplot_scatter,
    gnuplot_trajectory,
    save_trajectory,
    write_metadata,
    write_table,
)
from .thresholds import (
    DEFAULT_REL_TOL,
    MatchedPair,
    ThresholdEstimate,
    analytic_caps,
    bisect_threshold,
    matched_pair,
    standard_scheme_cap,
)

__version__ = "0.1.0"

__all__ = [
    "AboveThreshold",
    "BadBracket",
    "CONVERGENCE_HEADER",
    "CheckOutcome",
    "ConstantFunction",
    "ConvergenceResult",
    "ConvergenceRow",
    "CounterexampleReport",
    "CouplingFunction",
    "CouplingParseError",
    "CouplingProfile",
    "CumulativeDeviations",
    "DEFAULT_DT",
    "DEFAULT_GRID_SIZE",
    "DEFAULT_LOCK_TOL",
    "DEFAULT_OBSERVATION",
    "DEFAULT_REL_TOL",
    "DEFAULT_TRANSIENT",
    "DimensionTooLarge",
    "EXACT_RESIDUAL_TOL",
    "FrequencyVector",
    "Harmonic",
    "LockVerdict",
    "LockedState",
    "MatchedPair",
    "NoPositiveSlopeZero",
    "NoSolution",
    "NoSymmetricZero",
    "NoZeroCrossing",
    "NonFiniteState",
    "NotApplicable",
    "NotLocked",
    "OutOfRange",
    "PhaseState",
    "RingApproximation",
    "RinglockError",
    "SCATTER_HEADER",
    "ScatterResult",
    "ScatterRow",
    "SystemConfig",
    "ThresholdEstimate",
    "ZERO_EIG_TOL",
    "analytic_caps",
    "bisect_threshold",
    "chain_locked_state",
    "chain_threshold",
    "check_stability",
    "convergence_experiment",
    "counterexample_experiment",
    "coupling_text",
    "coupling_to_text",
    "cumulative_deviations",
    "derivative",
    "detect_lock",
    "evaluate",
    "find_ring_solution",
    "format_value",
    "from_target_deviations",
    "gnuplot_convergence",
    "gnuplot_scatter",
    "gnuplot_trajectory",
    "integrate",
    "integrate_trace",
    "invert_rising",
    "jacobian_at",
    "load_frequencies",
    "make_coupling",
    "matched_pair",
    "monotone_segments",
    "observe",
    "parse_coupling",
    "preimages",
    "profile",
    "ratio_upper_bound",
    "ring_approximate_state",
    "ring_exact_solution_exists",
    "ring_standard_approximate_state",
    "ring_upper_bound",
    "sample_uniform",
    "save_frequencies",
    "save_trajectory",
    "scatter_experiment",
    "standard_chain_locked_state",
    "standard_coupling_terms",
    "standard_ring_coupling_terms",
    "standard_scheme_cap",
    "velocity_field",
    "write_metadata",
    "write_table",
    "zero_state",
]

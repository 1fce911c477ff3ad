"""Batch command-line interface.

Subcommands:
    analytic        print thresholds and bounds for a coupling + frequency shape
    simulate        integrate one system and print the lock verdict
    threshold       bisect the empirical critical width for one system
    scatter         matched chain/ring widths over many random draws
    convergence     chain-vs-ring locked-state separation as N grows
    counterexample  the exact four-oscillator chain-locks/ring-cannot case

All floating-point output is round-trip formatted and runs are seeded, so
identical invocations write identical files.  Exit codes: 0 on success, 1
when `counterexample` finds a failing check, 2 on domain errors (bad
coupling text, degenerate shapes, bisection misuse).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .analytic import chain_threshold, ratio_upper_bound, ring_upper_bound
from .coupling import parse_coupling, profile
from .dynamics import (
    DEFAULT_DT,
    DEFAULT_LOCK_TOL,
    DEFAULT_OBSERVATION,
    DEFAULT_TRANSIENT,
    SystemConfig,
    integrate,
    integrate_trace,
    observe,
    zero_state,
)
from .errors import RinglockError
from .experiments import (
    CONVERGENCE_HEADER,
    SCATTER_HEADER,
    convergence_experiment,
    counterexample_experiment,
    scatter_experiment,
)
from .frequencies import cumulative_deviations, load_frequencies, sample_uniform
from .output import (
    gnuplot_convergence,
    gnuplot_scatter,
    gnuplot_trajectory,
    save_trajectory,
    write_metadata,
    write_table,
)
from .thresholds import DEFAULT_REL_TOL, analytic_caps, bisect_threshold

MAX_TRACE_SAMPLES = 2000


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringlock",
        description="Locking thresholds for rings and chains of coupled phase oscillators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, gamma: bool = False) -> None:
        p.add_argument(
            "--f",
            default="sin(1)",
            metavar="SPEC",
            help="coupling text, e.g. 'sin(1)', 'sin(1)+cos(3)', 'sin(1,phase=0.6)-c'",
        )
        p.add_argument("--scheme", choices=("standard", "telescopic"), default="telescopic")
        p.add_argument("--n", type=int, default=10, help="number of oscillators")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--shape-file",
            default=None,
            metavar="PATH",
            help="load the frequency shape from a file instead of sampling",
        )
        p.add_argument("--dt", type=float, default=DEFAULT_DT)
        p.add_argument("--transient", type=float, default=DEFAULT_TRANSIENT)
        p.add_argument("--observe", type=float, default=DEFAULT_OBSERVATION)
        p.add_argument("--tol", type=float, default=DEFAULT_LOCK_TOL, help="lock tolerance")
        if gamma:
            p.add_argument("--gamma", type=float, required=True, help="frequency-spread width")

    p_analytic = sub.add_parser("analytic", help="print thresholds and bounds")
    common(p_analytic)
    p_analytic.set_defaults(func=cmd_analytic)

    p_sim = sub.add_parser("simulate", help="integrate one system, print the verdict")
    common(p_sim, gamma=True)
    p_sim.add_argument("--topology", choices=("chain", "ring"), default="chain")
    p_sim.add_argument("--dump", default=None, metavar="PATH", help="save sampled phases")
    p_sim.add_argument("--gnuplot", action="store_true", help="emit a plot script next to --dump")
    p_sim.set_defaults(func=cmd_simulate)

    p_thr = sub.add_parser("threshold", help="bisect the empirical critical width")
    common(p_thr)
    p_thr.add_argument("--topology", choices=("chain", "ring"), default="chain")
    p_thr.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    p_thr.set_defaults(func=cmd_threshold)

    p_sc = sub.add_parser("scatter", help="matched chain/ring widths over random draws")
    common(p_sc)
    p_sc.add_argument("--trials", type=int, default=200)
    p_sc.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    p_sc.add_argument("--out", default=".", metavar="DIR")
    p_sc.add_argument("--gnuplot", action="store_true")
    p_sc.set_defaults(func=cmd_scatter)

    p_cv = sub.add_parser("convergence", help="chain-vs-ring separation as N grows")
    common(p_cv)
    p_cv.add_argument(
        "--n-values",
        default="8,16,32,64,128",
        metavar="LIST",
        help="comma-separated oscillator counts",
    )
    p_cv.add_argument("--fraction", type=float, default=0.5, help="width as a fraction of the chain threshold")
    p_cv.add_argument("--out", default=".", metavar="DIR")
    p_cv.add_argument("--gnuplot", action="store_true")
    p_cv.set_defaults(func=cmd_convergence)

    p_cx = sub.add_parser("counterexample", help="run the exact four-oscillator case")
    common(p_cx)
    p_cx.set_defaults(func=cmd_counterexample)

    return parser


def _frequencies(args):
    if args.shape_file is not None:
        return load_frequencies(args.shape_file)
    return sample_uniform(args.n, args.seed)


def cmd_analytic(args) -> int:
    f = parse_coupling(args.f)
    prof = profile(f)
    fv = _frequencies(args)
    cd = cumulative_deviations(fv)
    print(f"coupling          : {args.f}")
    print(f"oscillators       : {len(fv)}")
    print(f"value range       : [{prof.f_lower!r}, {prof.f_upper!r}]")
    print(f"max |slope|       : {prof.max_abs_slope!r}")
    print(f"rising zero       : {prof.rising_zero!r}")
    print(f"deviation extremes: [{cd.lower!r}, {cd.upper!r}]")
    print(f"chain threshold   : {chain_threshold(prof, cd)!r}")
    print(f"ring upper bound  : {ring_upper_bound(prof, cd)!r}")
    print(f"ratio upper bound : {ratio_upper_bound(prof)!r}")
    return 0


def cmd_simulate(args) -> int:
    f = parse_coupling(args.f)
    fv = _frequencies(args)
    cfg = SystemConfig(
        f=f,
        fv=fv,
        gamma=args.gamma,
        topology=args.topology,
        scheme=args.scheme,
        dt=args.dt,
        transient_time=args.transient,
        observation_time=args.observe,
    )
    settled = integrate(cfg, zero_state(cfg.n), cfg.transient_time)
    verdict, final = observe(cfg, settled, lock_tol=args.tol)
    print(f"locked              : {verdict.locked}")
    print(f"max frequency spread: {verdict.max_frequency_spread!r}")
    print(f"mean frequency      : {verdict.mean_frequency!r}")
    print(f"max phase drift     : {verdict.max_phase_drift!r}")
    diffs = final.diffs()
    print(f"final diffs (first 8): {np.array2string(diffs[:8], precision=6)}")
    if args.dump:
        total = cfg.transient_time + cfg.observation_time
        every = max(1, int(np.ceil(total / cfg.dt / MAX_TRACE_SAMPLES)))
        times, rows = integrate_trace(cfg, zero_state(cfg.n), total, sample_every=every)
        save_trajectory(args.dump, times, rows)
        print(f"trajectory saved    : {args.dump} ({len(times)} samples)")
        if args.gnuplot:
            script = os.path.splitext(args.dump)[0] + ".gp"
            gnuplot_trajectory(script, args.dump, cfg.n, f"{args.topology}, width {args.gamma}")
            print(f"plot script         : {script}")
    return 0


def cmd_threshold(args) -> int:
    f = parse_coupling(args.f)
    fv = _frequencies(args)
    chain_cap, ring_cap = analytic_caps(f, fv, args.scheme)
    cap = chain_cap if args.topology == "chain" else ring_cap
    cfg = SystemConfig(
        f=f,
        fv=fv,
        gamma=0.0,
        topology=args.topology,
        scheme=args.scheme,
        dt=args.dt,
        transient_time=args.transient,
        observation_time=args.observe,
    )
    est = bisect_threshold(cfg, 1.05 * cap, rel_tol=args.rel_tol, lock_tol=args.tol)
    print(f"topology        : {args.topology} ({args.scheme})")
    print(f"analytic cap    : {cap!r}")
    print(f"bracket         : [{est.gamma_low!r}, {est.gamma_high!r}]")
    print(f"estimate        : {est.estimate!r}")
    print(f"probes          : {est.iterations}")
    return 0


def cmd_scatter(args) -> int:
    f = parse_coupling(args.f)
    result = scatter_experiment(
        f,
        args.scheme,
        args.n,
        args.trials,
        args.seed,
        dt=args.dt,
        transient_time=args.transient,
        observation_time=args.observe,
        rel_tol=args.rel_tol,
        lock_tol=args.tol,
    )
    base = os.path.join(args.out, f"scatter_{args.scheme}_n{args.n}_seed{args.seed}")
    table = base + ".csv"
    write_table(table, SCATTER_HEADER, [row.as_tuple() for row in result.rows])
    write_metadata(
        base + ".json",
        {
            "experiment": "scatter",
            "coupling": result.coupling,
            "scheme": result.scheme,
            "n": result.n,
            "trials": result.trials,
            "seed0": result.seed0,
            "ratio_bound": result.ratio_bound,
            "max_ratio": result.max_ratio,
            "fraction_below_one": result.fraction_below_one,
            "dt": args.dt,
            "transient": args.transient,
            "observation": args.observe,
            "lock_tol": args.tol,
            "rel_tol": args.rel_tol,
        },
    )
    print(f"rows               : {len(result.rows)} -> {table}")
    print(f"ratio bound        : {result.ratio_bound!r}")
    print(f"max ratio observed : {result.max_ratio!r}")
    print(f"fraction ratio < 1 : {result.fraction_below_one!r}")
    if args.gnuplot:
        script = base + ".gp"
        gnuplot_scatter(script, table, result.ratio_bound,
                        f"{result.coupling} ({result.scheme}, N={result.n})")
        print(f"plot script        : {script}")
    return 0


def cmd_convergence(args) -> int:
    f = parse_coupling(args.f)
    try:
        n_values = tuple(int(part) for part in args.n_values.split(",") if part.strip())
    except ValueError:
        print(f"error: cannot parse --n-values {args.n_values!r}", file=sys.stderr)
        return 2
    result = convergence_experiment(
        f,
        args.fraction,
        n_values,
        args.seed,
        dt=args.dt,
        min_transient=args.transient,
        lock_tol=args.tol,
    )
    base = os.path.join(args.out, f"convergence_seed{args.seed}")
    table = base + ".csv"
    write_table(table, CONVERGENCE_HEADER, [row.as_tuple() for row in result.rows])
    write_metadata(
        base + ".json",
        {
            "experiment": "convergence",
            "coupling": result.coupling,
            "gamma_fraction": result.gamma_fraction,
            "seed": result.seed,
            "n_values": list(n_values),
            "slope": result.slope,
            "approx_slope": result.approx_slope,
            "dt": args.dt,
            "min_transient": args.transient,
            "lock_tol": args.tol,
        },
    )
    print(f"rows          : {len(result.rows)} -> {table}")
    print(f"measured slope: {result.slope!r}")
    print(f"analytic slope: {result.approx_slope!r}")
    if args.gnuplot:
        script = base + ".gp"
        gnuplot_convergence(script, table, f"{result.coupling}, fraction {result.gamma_fraction}")
        print(f"plot script   : {script}")
    return 0


def cmd_counterexample(args) -> int:
    report = counterexample_experiment(
        dt=args.dt,
        transient_time=args.transient,
        observation_time=args.observe,
        lock_tol=args.tol,
    )
    for check in report.checks:
        tag = "PASS" if check.passed else "FAIL"
        print(f"{tag}  {check.name}: {check.detail}")
    print("all checks passed" if report.passed else "SOME CHECKS FAILED")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RinglockError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

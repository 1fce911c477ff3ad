"""Deterministic file output: delimited tables, metadata sidecars, plot scripts.

Every writer is intentionally timestamp-free and formats floats with repr
(shortest round-trip), so rerunning an experiment with the same seed yields
byte-identical files.  Plotting stays toolchain-neutral: an optional emitter
writes a gnuplot script next to each table instead of rendering anything.
"""

from __future__ import annotations

import csv
import json
import os
from collections.abc import Iterable, Mapping, Sequence

import numpy as np


def format_value(value) -> str:
    """Shortest round-trip text for table cells."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_table(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a comma-delimited table with a header row."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def write_metadata(path: str, metadata: Mapping) -> None:
    """Write a JSON sidecar with sorted keys and no volatile fields."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as handle:
        json.dump(_plain(metadata), handle, indent=2, sort_keys=True)
        handle.write("\n")


def _plain(value):
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def save_trajectory(
    path: str, times: np.ndarray, phases: np.ndarray, header_prefix: str = "theta"
) -> None:
    """Save sampled phases, one row per time, one column per oscillator."""
    n = phases.shape[1]
    header = ["time"] + [f"{header_prefix}{k}" for k in range(n)]
    rows = (
        [times[i]] + [phases[i, k] for k in range(n)] for i in range(len(times))
    )
    write_table(path, header, rows)


# ---------------------------------------------------------------------------
# gnuplot script emitters (one per experiment figure)
# ---------------------------------------------------------------------------

def gnuplot_scatter(
    script_path: str, data_path: str, ratio_bound: float, title: str
) -> None:
    """Scatter of ring vs chain empirical widths with the bound lines.

    The solid line is ratio_bound * x (never trespassed); the dashed line is
    y = x (points below it are rings that lock worse than their chain).
    """
    data = os.path.basename(data_path)
    text = f"""set datafile separator ","
set key top left
set title "{title}"
set xlabel "chain critical width (empirical)"
set ylabel "ring critical width (empirical)"
plot "{data}" skip 1 using 5:6 with points pt 7 ps 0.6 title "matched pairs", \\
     {ratio_bound!r}*x with lines lw 2 title "ratio bound", \\
     x dashtype 2 lw 1 title "equal widths"
"""
    _write_text(script_path, text)


def gnuplot_convergence(script_path: str, data_path: str, title: str) -> None:
    """Log-log separation between chain and shifted-ring states versus N."""
    data = os.path.basename(data_path)
    text = f"""set datafile separator ","
set logscale xy
set key top right
set title "{title}"
set xlabel "number of oscillators N"
set ylabel "max |chain diffs - ring diffs|"
plot "{data}" skip 1 using 1:3 with linespoints pt 7 title "measured separation", \\
     "{data}" skip 1 using 1:5 with lines dashtype 2 title "analytic bound"
"""
    _write_text(script_path, text)


def gnuplot_trajectory(script_path: str, data_path: str, n: int, title: str) -> None:
    """Phase trajectories, one curve per oscillator."""
    data = os.path.basename(data_path)
    curves = ", ".join(
        f'"{data}" skip 1 using 1:{k + 2} with lines title "osc {k}"' for k in range(n)
    )
    text = f"""set datafile separator ","
set key outside
set title "{title}"
set xlabel "time"
set ylabel "phase"
plot {curves}
"""
    _write_text(script_path, text)


def _write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as handle:
        handle.write(text)

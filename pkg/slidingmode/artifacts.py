"""Reading and writing result files.

This module is the only place that touches the filesystem: CSV tables,
control-trace text files and SVG charts. Numbers are written with 12
significant digits.
"""

import csv
from collections.abc import Iterable, Mapping
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dynamics import Trajectory  # noqa: E402
from .lyapunov import ControlTrace  # noqa: E402
from .periods import PeriodReport  # noqa: E402
from .protocol import Phase, ProtocolStats  # noqa: E402
from .worst_case import WorstCaseResult  # noqa: E402

plt.rcParams["svg.hashsalt"] = "slidingmode"
plt.rcParams["svg.fonttype"] = "none"

TRAJECTORY_COLUMNS = ["t", "x", "y", "z", "ux", "uy", "uz", "ex", "ey", "ez"]
PERIOD_COLUMNS = ["eps", "p0", "t1", "t2", "diff"]
WORST_CASE_COLUMNS = ["t_f", "eps", "n_segments", "z_min_search", "z_analytic", "gap"]
PROTOCOL_COLUMNS = ["trial", "cycle", "t", "outcome", "pre_failure_prob", "phase"]
SUMMARY_COLUMNS = ["scope", "total", "failures", "rate", "ci95"]


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.12g}"


def _open_for_write(path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def write_rows(path: Path, header: list[str], rows: Iterable[Iterable]) -> Path:
    with _open_for_write(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return Path(path)


def read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def write_trajectory_csv(path: Path, trajectory: Trajectory) -> Path:
    rows = (
        [t, *r, *u, *e]
        for t, r, u, e in zip(trajectory.t, trajectory.r, trajectory.controls, trajectory.noise)
    )
    return write_rows(path, TRAJECTORY_COLUMNS, rows)


def write_trace(path: Path, trace: ControlTrace) -> Path:
    """Header ``dt=<value>`` followed by one ``ux uy uz`` line per step."""
    with _open_for_write(path) as f:
        f.write(f"dt={fmt(trace.dt)}\n")
        for ux, uy, uz in trace.samples:
            f.write(f"{fmt(ux)} {fmt(uy)} {fmt(uz)}\n")
    return Path(path)


def read_trace(path: Path) -> ControlTrace:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("dt="):
        raise ValueError(f"{path}: control trace must start with a 'dt=<value>' line")
    dt = float(lines[0][3:])
    samples = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{number}: expected 'ux uy uz', got {line!r}")
        samples.append([float(v) for v in parts])
    return ControlTrace(dt, np.array(samples).reshape(-1, 3))


def write_period_report(path: Path, report: PeriodReport) -> Path:
    rows = ([row.eps, row.p0, row.t1, row.t2, row.diff] for row in report.rows)
    return write_rows(path, PERIOD_COLUMNS, rows)


def write_worst_case_report(path: Path, results: Iterable[WorstCaseResult]) -> Path:
    rows = (
        [r.t_f, r.eps, r.n_segments, r.z_f_min, r.analytic_z_f, r.gap] for r in results
    )
    return write_rows(path, WORST_CASE_COLUMNS, rows)


def write_protocol_csv(path: Path, stats: ProtocolStats) -> Path:
    rows = (
        [
            e.trial,
            e.cycle,
            e.measurement.t,
            e.measurement.outcome.value,
            e.measurement.pre_failure_prob,
            e.phase.value,
        ]
        for e in stats.events
    )
    return write_rows(path, PROTOCOL_COLUMNS, rows)


def write_protocol_summary(path: Path, stats: ProtocolStats) -> Path:
    rows = (
        [scope, s["total"], s["failures"], s["rate"], s["ci95"]]
        for scope, s in stats.summary().items()
    )
    return write_rows(path, SUMMARY_COLUMNS, rows)


def per_cycle_failure_rate(stats: ProtocolStats) -> tuple[np.ndarray, np.ndarray]:
    """Fraction of hold measurements failing at each cycle index."""
    cycles = sorted({e.cycle for e in stats.events if e.phase is Phase.HOLD})
    rates = []
    for cycle in cycles:
        outcomes = [e.failed for e in stats.events if e.phase is Phase.HOLD and e.cycle == cycle]
        rates.append(sum(outcomes) / len(outcomes))
    return np.array(cycles, dtype=float), np.array(rates)


def plot_series(
    path: Path,
    x,
    series: Mapping[str, np.ndarray],
    xlabel: str,
    ylabel: str,
    title: str,
    hlines: Mapping[str, float] | None = None,
    drawstyle: str = "default",
) -> Path:
    """Line chart as SVG; each series is drawn as one path inside ``<g id="series-NAME">``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, y in series.items():
        (line,) = ax.plot(x, y, label=name, linewidth=1.5, drawstyle=drawstyle)
        line.set_gid(f"series-{name}")
    for name, level in (hlines or {}).items():
        ax.axhline(level, color="grey", linestyle="--", linewidth=1.0, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path

"""Unit tests for result files and charts."""

import numpy as np
import pytest

from slidingmode.artifacts import (
    PROTOCOL_COLUMNS,
    SUMMARY_COLUMNS,
    TRAJECTORY_COLUMNS,
    fmt,
    per_cycle_failure_rate,
    plot_series,
    read_rows,
    read_trace,
    write_period_report,
    write_protocol_csv,
    write_protocol_summary,
    write_trace,
    write_trajectory_csv,
)
from slidingmode.bloch import ONE, SlidingModeConfig
from slidingmode.dynamics import IntegratorConfig
from slidingmode.lyapunov import ControlTrace, LyapunovConfig, design_drive
from slidingmode.periods import default_grids, verify_t2_geq_t1
from slidingmode.protocol import ProtocolConfig, run_protocol


@pytest.fixture(scope="module")
def drive():
    cfg = LyapunovConfig.sigma_y(100.0, terminal_p=0.01)
    return design_drive(ONE, cfg, IntegratorConfig(dt=1e-3))


@pytest.fixture(scope="module")
def stats():
    cfg = ProtocolConfig(
        smc=SlidingModeConfig(0.05, 0.5),
        integrator=IntegratorConfig(dt=1e-3),
        n_trials=3,
        n_cycles=4,
        seed=2,
    )
    return run_protocol(cfg)


class TestFormatting:
    def test_twelve_significant_digits(self):
        assert fmt(1 / 3) == "0.333333333333"
        assert fmt(7) == "7"
        assert fmt(np.int64(3)) == "3"


class TestControlTraceFile:
    def test_write_then_read(self, tmp_path, drive):
        path = write_trace(tmp_path / "trace.txt", drive.trace)
        lines = path.read_text().splitlines()
        assert lines[0] == "dt=0.001"
        assert len(lines) == len(drive.trace) + 1
        back = read_trace(path)
        assert back.dt == drive.trace.dt
        assert np.allclose(back.samples, drive.trace.samples, rtol=1e-11)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 1 0\n")
        with pytest.raises(ValueError, match="dt="):
            read_trace(path)

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("dt=0.1\n0 1\n")
        with pytest.raises(ValueError, match=":2:"):
            read_trace(path)

    def test_empty_trace(self, tmp_path):
        path = write_trace(tmp_path / "empty.txt", ControlTrace.empty(0.01))
        assert len(read_trace(path)) == 0


class TestCsvFiles:
    def test_trajectory_columns(self, tmp_path, drive):
        rows = read_rows(write_trajectory_csv(tmp_path / "t.csv", drive.trajectory))
        assert list(rows[0]) == TRAJECTORY_COLUMNS
        assert len(rows) == len(drive.trajectory)
        assert float(rows[0]["z"]) == pytest.approx(-1.0)

    def test_period_report(self, tmp_path):
        report = verify_t2_geq_t1(*default_grids(3, 2))
        rows = read_rows(write_period_report(tmp_path / "p.csv", report))
        assert len(rows) == 6
        assert all(float(r["diff"]) >= -1e-12 for r in rows)

    def test_protocol_files(self, tmp_path, stats):
        rows = read_rows(write_protocol_csv(tmp_path / "protocol.csv", stats))
        assert list(rows[0]) == PROTOCOL_COLUMNS
        assert len(rows) == stats.total
        assert {r["phase"] for r in rows} <= {"drive", "hold", "recovery"}
        assert {r["outcome"] for r in rows} <= {"zero", "one"}

        summary = read_rows(write_protocol_summary(tmp_path / "summary.csv", stats))
        assert list(summary[0]) == SUMMARY_COLUMNS
        assert [r["scope"] for r in summary] == ["all", "non_recovery", "hold"]
        assert int(summary[0]["total"]) == stats.total

    def test_per_cycle_rate(self, stats):
        cycles, rates = per_cycle_failure_rate(stats)
        assert cycles.tolist() == [1.0, 2.0, 3.0, 4.0]
        assert np.all((rates >= 0.0) & (rates <= 1.0))


class TestCharts:
    def test_series_groups(self, tmp_path):
        x = np.linspace(0.0, 1.0, 11)
        path = plot_series(
            tmp_path / "chart.svg",
            x,
            {"p_zero": x**2, "uy": -x},
            xlabel="t",
            ylabel="value",
            title="chart",
            hlines={"p0": 0.5},
        )
        svg = path.read_text()
        assert svg.lstrip().startswith("<?xml")
        assert 'id="series-p_zero"' in svg
        assert 'id="series-uy"' in svg

    def test_output_is_reproducible(self, tmp_path):
        x = np.arange(5.0)
        a = plot_series(tmp_path / "a.svg", x, {"s": x}, "x", "y", "t")
        b = plot_series(tmp_path / "b.svg", x, {"s": x}, "x", "y", "t")
        assert a.read_bytes() == b.read_bytes()

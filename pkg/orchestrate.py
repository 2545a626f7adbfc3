#!/usr/bin/env python3
"""
Sliding-Mode Control Toolkit
Prefect-powered design, simulation and verification runs behind one command line.
"""

import argparse
import math
import sys
from pathlib import Path

from prefect import flow, task
from prefect.cache_policies import NO_CACHE

from slidingmode import (
    NORTH,
    ONE,
    PLUS,
    ZERO,
    ConfigError,
    DriveDesignError,
    IntegratorConfig,
    LyapunovConfig,
    PeriodDomainError,
    ProtocolStats,
    PureState,
    SlidingModeConfig,
    UncertaintyClass,
    brute_force_worst,
    compare_lemma1,
    compare_lemma2,
    constant_axis,
    default_grids,
    design_drive,
    evaluate_switching,
    get_batch_size,
    get_protocol_config,
    integrate_costate,
    load_config,
    noise_tolerance,
    per_cycle_failure_rate,
    period_t1,
    period_t2,
    plan_protocol,
    plot_series,
    print_banner,
    print_check,
    print_error,
    print_header,
    print_info,
    print_kv,
    print_step,
    print_success,
    print_warning,
    propagate_bloch,
    replay,
    run_trials,
    select_period,
    switching_closed_form,
    theorem_bound_check,
    time_optimal_reference,
    verify_t2_geq_t1,
    write_period_report,
    write_protocol_csv,
    write_protocol_summary,
    write_trace,
    write_trajectory_csv,
    write_worst_case_report,
)
from slidingmode.periods import omega

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DESIGN = 3

DEFAULT_CONFIG = Path(__file__).parent / "config.yaml"

# Terminal |⟨0|ψ⟩|² bands for the drive replayed under uniform noise.
NOISE_TOLERANCE_CASES = [
    ("x", 0.02, 0.0002),
    ("y", 0.02, 0.0002),
    ("x", 0.2, 0.0001),
    ("y", 0.2, 0.0013),
]
NOISE_TOLERANCE_TARGET = 0.99


def parse_initial(value: str) -> PureState:
    """``0``, ``1``, ``plus`` or ``theta,phi`` (radians)."""
    named = {"0": ZERO, "1": ONE, "plus": PLUS, "+": PLUS}
    if value in named:
        return named[value]
    try:
        theta, phi = (float(v) for v in value.split(","))
    except ValueError:
        raise ValueError(f"initial state must be 0, 1, plus or 'theta,phi'; got {value!r}") from None
    return PureState.from_angles(theta, phi)


# ---------------------------------------------------------------------------
# design-period
# ---------------------------------------------------------------------------


def cmd_design_period(args) -> int:
    try:
        smc = SlidingModeConfig(args.p0, args.eps)
        design = select_period(smc, UncertaintyClass.parse(args.cls))
    except ValueError as e:
        print_error(str(e))
        return EXIT_USAGE

    print_header("Measurement Period Design")
    print_kv("p0", smc.p0)
    print_kv("eps", smc.eps)
    print_kv("uncertainty class", args.cls)
    print_kv("T", f"{design.T:.3f}")
    print_kv("T (full precision)", design.T)
    print_kv("rule", design.rule_used.name)
    print_kv("p' threshold", f"{design.p_threshold:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# design-drive
# ---------------------------------------------------------------------------


@task(name="Design Lyapunov Drive", cache_policy=NO_CACHE)
def design_drive_task(initial: PureState, cfg: LyapunovConfig, dt: float):
    return design_drive(initial, cfg, IntegratorConfig(dt=dt))


@task(name="Time-Optimal Reference", cache_policy=NO_CACHE)
def time_optimal_task(u_max: float, dt: float):
    trace = time_optimal_reference(u_max, dt=dt)
    return trace, replay(trace, ONE)


@task(name="Write Drive Artifacts", cache_policy=NO_CACHE)
def write_drive_artifacts(trace, trajectory, out: Path, stem: str) -> list[Path]:
    out = Path(out)
    written = [
        write_trace(out / f"{stem}_trace.txt", trace),
        write_trajectory_csv(out / f"{stem}_trajectory.csv", trajectory),
        plot_series(
            out / f"{stem}_probability.svg",
            trajectory.t,
            {"p_zero": 1.0 - trajectory.failure_probability},
            xlabel="t",
            ylabel="probability of |0⟩",
            title="Probability of |0⟩ under the designed drive",
        ),
        plot_series(
            out / f"{stem}_control.svg",
            trajectory.t,
            {
                name: trajectory.controls[:, i]
                for i, name in enumerate(("ux", "uy", "uz"))
                if trajectory.controls[:, i].any()
            }
            or {"uy": trajectory.controls[:, 1]},
            xlabel="t",
            ylabel="u(t)",
            title="Control value",
            drawstyle="steps-post",
        ),
    ]
    return written


@flow(name="Design Drive", log_prints=True)
def design_drive_flow(
    initial: str = "1",
    gain: float = 100.0,
    terminal_p: float = 0.01,
    dt: float = 1e-4,
    max_time: float = 1.0,
    time_optimal: bool = False,
    u_max: float = 100.0,
    out: str = "results",
) -> float:
    """Design the drive into D, write its trace and charts, return its duration."""
    print_header("Drive Design")
    if time_optimal:
        print_step(f"Building the two-segment bang-bang reference (u_max={u_max})...")
        trace, trajectory = time_optimal_task(u_max, dt)
        stem = "time_optimal"
    else:
        state = parse_initial(initial)
        cfg = LyapunovConfig.sigma_y(gain, terminal_p=terminal_p, max_time=max_time)
        print_step(f"Simulating the closed loop (K={gain}, dt={dt}, terminal_p={terminal_p})...")
        trace, trajectory = design_drive_task(state, cfg, dt)
        stem = "drive"

    for path in write_drive_artifacts(trace, trajectory, Path(out), stem):
        print_info(f"Wrote {path}")
    if time_optimal:
        for start, end, (ux, uy, uz) in trace.segments():
            print_kv(f"segment [{start:.4f}, {end:.4f}]", f"u = ({ux:g}, {uy:g}, {uz:g})")
    print_kv("duration", f"{trace.duration:.4f}")
    print_kv("final failure prob", float(trajectory.failure_probability[-1]))
    print_success(f"Drive designed: {len(trace)} steps")
    return trace.duration


def cmd_design_drive(args) -> int:
    try:
        parse_initial(args.initial)
        if args.time_optimal and not args.umax > 0.0:
            raise ValueError(f"--umax must be > 0, got {args.umax}")
        LyapunovConfig.sigma_y(args.gain, terminal_p=args.terminal_p, max_time=args.max_time)
    except ValueError as e:
        print_error(str(e))
        return EXIT_USAGE
    try:
        design_drive_flow(
            initial=args.initial,
            gain=args.gain,
            terminal_p=args.terminal_p,
            dt=args.dt,
            max_time=args.max_time,
            time_optimal=args.time_optimal,
            u_max=args.umax,
            out=str(args.out),
        )
    except DriveDesignError as e:
        print_error(f"Drive design failed: {e}")
        return EXIT_DESIGN
    return EXIT_OK


# ---------------------------------------------------------------------------
# run-protocol
# ---------------------------------------------------------------------------


@task(name="Load Experiment Configuration")
def load_experiment(path: str) -> dict:
    return load_config(path)


@task(name="Plan Protocol", cache_policy=NO_CACHE)
def plan_protocol_task(cfg):
    return plan_protocol(cfg)


@task(task_run_name="Trials {first}-{last}", cache_policy=NO_CACHE)
def run_batch(plan, first: int, last: int) -> ProtocolStats:
    """Run trials first..last (inclusive)."""
    stats = run_trials(plan, range(first, last + 1))
    print_info(f"Trials {first}-{last}: {stats.failures}/{stats.total} failures")
    return stats


@task(name="Write Protocol Artifacts", cache_policy=NO_CACHE)
def write_protocol_artifacts(stats: ProtocolStats, out: Path, p0: float) -> list[Path]:
    out = Path(out)
    cycles, rates = per_cycle_failure_rate(stats)
    return [
        write_protocol_csv(out / "protocol.csv", stats),
        write_protocol_summary(out / "protocol_summary.csv", stats),
        plot_series(
            out / "protocol_failure_rate.svg",
            cycles,
            {"hold_failure_rate": rates},
            xlabel="cycle",
            ylabel="failure rate",
            title="Per-cycle failure rate across trials",
            hlines={"p0": p0},
        ),
    ]


def _trace_source(trace) -> str:
    return "designed" if trace is None else "loaded"


@flow(name="Run Protocol", log_prints=True)
def run_protocol_flow(
    config_path: str = str(DEFAULT_CONFIG), out: str = "results", seed: int | None = None
) -> ProtocolStats:
    """Monte-Carlo run of the drive/measure/recover protocol in parallel trial batches."""
    print_header("Sliding-Mode Protocol")
    config = load_experiment(config_path)
    cfg = get_protocol_config(config, seed, base_dir=Path(config_path).parent)
    batch_size = get_batch_size(config)

    print_step("Designing period and drives...")
    plan = plan_protocol_task(cfg)
    print_kv("period T", plan.period)
    print_kv("rule", plan.design.rule_used.value)
    print_kv("p' threshold", plan.design.p_threshold)
    print_kv("drive T0", f"{plan.drive.duration} ({_trace_source(cfg.drive_trace)})")
    print_kv("recovery T1", f"{plan.recovery.duration} ({_trace_source(cfg.recovery_trace)})")
    print_kv("hold waveform", f"{cfg.hold_waveform} ({cfg.uncertainty_class.value})")

    batches = [
        (first, min(first + batch_size, cfg.n_trials) - 1)
        for first in range(0, cfg.n_trials, batch_size)
    ]
    print_info(f"Submitting {len(batches)} batch(es) of up to {batch_size} trials in parallel...")
    futures = [run_batch.submit(plan, first, last) for first, last in batches]
    parts = [future.result() for future in futures]
    stats = ProtocolStats.merge(parts)

    for path in write_protocol_artifacts(stats, Path(out), cfg.smc.p0):
        print_info(f"Wrote {path}")

    print_header("Protocol Summary")
    for scope, s in stats.summary().items():
        print_kv(
            f"{scope} measurements",
            f"total={s['total']} failures={s['failures']} "
            f"rate={s['rate']:.6f} ci95={s['ci95']:.6f}",
        )
    print_kv("recoveries", stats.recoveries)
    print_kv("max hold failure prob", stats.max_hold_failure_prob)
    if stats.max_hold_failure_prob > cfg.smc.p0 + 1e-9:
        print_warning("Computed failure probability exceeded p0 at a scheduled measurement")
    print_success(f"Protocol finished: {stats.n_trials} trials")
    return stats


def cmd_run_protocol(args) -> int:
    try:
        config = load_config(args.config)
        get_protocol_config(config, args.seed, base_dir=Path(args.config).parent)
        get_batch_size(config)
    except (ConfigError, ValueError) as e:
        print_error(str(e))
        return EXIT_USAGE
    try:
        run_protocol_flow(config_path=str(args.config), out=str(args.out), seed=args.seed)
    except (DriveDesignError, PeriodDomainError) as e:
        print_error(f"Protocol run failed: {e}")
        return EXIT_DESIGN
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@task(name="Check Period Inequality")
def check_period_inequality(n_eps: int, n_p0: int, out: str) -> tuple[str, bool, str]:
    report = verify_t2_geq_t1(*default_grids(n_eps, n_p0))
    write_period_report(Path(out) / "period_report.csv", report)
    spot = SlidingModeConfig(0.01, 0.2)
    gap = round(period_t2(spot), 3) - round(period_t1(spot), 3)
    passed = report.passed and abs(gap - 0.047) < 1e-9
    detail = (
        f"{len(report.rows)} points, min T2-T1 = {report.min_diff:.3e}, "
        f"{len(report.violations)} violations, gap(0.2, 0.01) = {gap:.3f}"
    )
    return "T2 >= T1 on the (eps, p0) grid", passed, detail


@task(name="Check Worst-Case Comparisons")
def check_comparisons(waveform_samples: int, seed: int) -> tuple[str, bool, str]:
    first = compare_lemma1(0.2, 0.0)
    second = compare_lemma2(0.2, waveform_samples=waveform_samples, seed=seed)
    passed = first.passed and second.passed
    detail = (
        f"drift vs drift-free: {first.violations} violations (min gap {first.min_gap:.2e}); "
        f"time-varying vs constant x field: {second.violations} violations"
    )
    return "comparison trajectories dominate", passed, detail


@task(name="Check Switching Function", cache_policy=NO_CACHE)
def check_switching(eps: float, dt: float) -> tuple[str, bool, str]:
    t_f = math.pi / omega(eps)
    waveform = constant_axis("x", eps)
    cfg = IntegratorConfig(dt=dt)
    state = propagate_bloch(NORTH, None, waveform, (0.0, t_f), cfg)
    h = evaluate_switching(state, integrate_costate(waveform, t_f, cfg))
    closed = switching_closed_form(eps, state.t, t_f)
    error = float(abs(h - closed).max())
    interior = h[1:-1]
    passed = error < 1e-8 and bool((interior < 0.0).all())
    return "switching function keeps its sign", passed, f"max |h - closed form| = {error:.2e}"


@task(task_run_name="Worst-case search eps={eps} t_f={t_f:.4f}", cache_policy=NO_CACHE)
def check_worst_case(eps: float, t_f: float, n_segments: int, n_random: int, seed: int):
    return brute_force_worst(eps, t_f, n_segments, n_random=n_random, seed=seed)


@task(task_run_name="Failure bound class={cls}", cache_policy=NO_CACHE)
def check_theorem_bound(cls: str, eps: float, p0: float, n: int, seed: int):
    report = theorem_bound_check(UncertaintyClass.parse(cls), eps, p0, n, seed=seed)
    passed = report.passed and abs(report.saturating_failure - p0) < 1e-6
    detail = (
        f"T={report.design.T:.4f}, max p={report.max_failure:.6f}, "
        f"saturating p={report.saturating_failure:.6f}, {report.violations} violations"
    )
    return f"failure bound over {n} waveforms ({cls})", passed, detail


@task(name="Check Noise Tolerance", cache_policy=NO_CACHE)
def check_noise_tolerance(n_seeds: int, dt: float, seed: int) -> tuple[str, bool, str]:
    drive = design_drive(ONE, LyapunovConfig.sigma_y(100.0, terminal_p=0.01), IntegratorConfig(dt))
    passed, parts = True, []
    for axis, eps, band in NOISE_TOLERANCE_CASES:
        values = noise_tolerance(drive.trace, axis, eps, range(seed, seed + n_seeds))
        spread = float(abs(values - NOISE_TOLERANCE_TARGET).max())
        ok = spread <= band + 1e-6
        passed = passed and ok
        parts.append(f"{axis}/{eps}: ±{spread:.5f}{'' if ok else ' (over ' + str(band) + ')'}")
    return "drive tolerates uniform noise", passed, "; ".join(parts)


@flow(name="Verify", log_prints=True)
def verify_flow(
    quick: bool = False,
    eps: float | None = None,
    p0: float | None = None,
    seed: int = 0,
    dt: float = 1e-4,
    out: str = "results",
) -> bool:
    """Run the verification checks in parallel and report PASS/FAIL per check."""
    print_header("Verification")
    grid = 10 if quick else 50
    segments, n_random = (6, 20) if quick else (10, 200)
    sweep_random = 5 if quick else 20
    n_bound = 50 if quick else 500
    n_compare = 10 if quick else 100
    n_seeds = 10 if quick else 100

    checks = [
        check_period_inequality.submit(grid, grid, out),
        check_comparisons.submit(n_compare, seed),
        check_switching.submit(0.2, dt if not quick else 1e-3),
        check_theorem_bound.submit("xy", 0.2, 0.01, n_bound, seed),
        check_theorem_bound.submit("x", 0.2, 0.01, n_bound, seed),
        check_noise_tolerance.submit(n_seeds, dt, seed),
    ]

    searches = [check_worst_case.submit(0.2, 1.0, segments, n_random, seed)]
    sweep_eps = (0.2,) if quick else (0.02, 0.2, 1.0)
    for sweep in sweep_eps:
        for fraction in (0.2, 0.5, 1.0):
            t_f = fraction * math.pi / omega(sweep)
            searches.append(check_worst_case.submit(sweep, t_f, 8, sweep_random, seed))

    results = [future.result() for future in checks]
    worst = [future.result() for future in searches]
    write_worst_case_report(Path(out) / "worst_case.csv", worst)
    failed_searches = [r for r in worst if not r.optimal]
    results.append(
        (
            "constant bang-bang is the worst case",
            not failed_searches,
            f"{len(worst)} searches, largest gap below analytic = "
            f"{max(-r.gap for r in worst):.2e}, min random margin = "
            f"{min(r.random_z_min - r.analytic_z_f for r in worst):.2e}",
        )
    )

    if eps is not None and p0 is not None:
        spot = SlidingModeConfig(p0, eps)
        t1 = period_t1(spot)
        if p0 <= spot.p_threshold:
            t2 = period_t2(spot)
            detail = f"T1={t1:.3f}, T2={t2:.3f}, T2-T1={t2 - t1:.3f}"
            results.append((f"spot check eps={eps} p0={p0}", t2 >= t1 - 1e-12, detail))
        else:
            results.append((f"spot check eps={eps} p0={p0}", True, f"T1={t1:.3f}; p0 > p'"))

    print_header("Verification Report")
    for name, passed, detail in results:
        print_check(name, passed, detail)
    failed = [name for name, passed, _ in results if not passed]
    if failed:
        print_error(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return False
    print_success(f"All {len(results)} checks passed")
    return True


def cmd_verify(args) -> int:
    if (args.eps is None) != (args.p0 is None):
        print_error("--eps and --p0 must be given together")
        return EXIT_USAGE
    if args.eps is not None:
        try:
            SlidingModeConfig(args.p0, args.eps)
        except ValueError as e:
            print_error(str(e))
            return EXIT_USAGE
    passed = verify_flow(
        quick=args.quick,
        eps=args.eps,
        p0=args.p0,
        seed=args.seed or 0,
        dt=args.dt,
        out=str(args.out),
    )
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
        default = argparse.SUPPRESS if suppress else None
        p.add_argument("--seed", type=int, default=default)
        p.add_argument("--out", type=Path, default=default if suppress else Path("results"))
        p.add_argument("--dt", type=float, default=default if suppress else 1e-4)

    parser = argparse.ArgumentParser(
        prog="orchestrate.py",
        description="Design and verify sliding-mode control of a two-level quantum system.",
    )
    add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    period = sub.add_parser("design-period", parents=[common], help="select the period T")
    period.add_argument("--p0", type=float, required=True)
    period.add_argument("--eps", type=float, required=True)
    period.add_argument("--class", dest="cls", choices=["xy", "x", "y"], required=True)
    period.set_defaults(handler=cmd_design_period)

    drive = sub.add_parser("design-drive", parents=[common], help="design a drive into D")
    drive.add_argument("--initial", default="1", help="0, 1, plus or 'theta,phi'")
    drive.add_argument("--gain", type=float, default=100.0)
    drive.add_argument("--terminal-p", type=float, default=0.01)
    drive.add_argument("--max-time", type=float, default=1.0)
    drive.add_argument("--time-optimal", action="store_true")
    drive.add_argument("--umax", type=float, default=100.0)
    drive.set_defaults(handler=cmd_design_drive)

    protocol = sub.add_parser("run-protocol", parents=[common], help="Monte-Carlo protocol run")
    protocol.add_argument("config", nargs="?", type=Path, default=DEFAULT_CONFIG)
    protocol.set_defaults(handler=cmd_run_protocol)

    verify = sub.add_parser("verify", parents=[common], help="run the verification checks")
    verify.add_argument("--quick", action="store_true")
    verify.add_argument("--eps", type=float)
    verify.add_argument("--p0", type=float)
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.dt > 0.0:
        parser.error(f"--dt must be > 0, got {args.dt}")
    print_banner()
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())

"""Sliding-mode control of two-level quantum systems under bounded uncertainty."""

from .artifacts import (
    per_cycle_failure_rate,
    plot_series,
    read_trace,
    write_period_report,
    write_protocol_csv,
    write_protocol_summary,
    write_trace,
    write_trajectory_csv,
    write_worst_case_report,
)
from .bloch import (
    NORTH,
    ONE,
    PLUS,
    ZERO,
    BlochVector,
    HamiltonianCoeffs,
    PureState,
    SlidingModeConfig,
    failure_probability,
    from_bloch,
    in_domain,
    sliding_mode_value,
    to_bloch,
)
from .config import (
    ConfigError,
    get_batch_size,
    get_control_trace,
    get_integrator_config,
    get_lyapunov_config,
    get_protocol_config,
    get_sliding_mode_config,
    load_config,
    parse_config,
)
from .display import (
    print_banner,
    print_check,
    print_error,
    print_header,
    print_info,
    print_kv,
    print_step,
    print_success,
    print_warning,
)
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    TrajectorySample,
    exact_step_constant,
    piecewise_curve,
    propagate_bloch,
    propagate_piecewise,
    propagate_schrodinger,
)
from .lyapunov import (
    ControlTrace,
    DriveDesign,
    DriveDesignError,
    LyapunovConfig,
    control_value,
    design_drive,
    lyapunov_value,
    noise_tolerance,
    replay,
    time_optimal_reference,
)
from .measurement import MeasurementRecord, Outcome, RngStream, born_probabilities, measure_z
from .periods import (
    PeriodDesign,
    PeriodDomainError,
    PeriodReport,
    PeriodRule,
    default_grids,
    period_t1,
    period_t2,
    select_period,
    verify_t2_geq_t1,
)
from .protocol import (
    Phase,
    ProtocolConfig,
    ProtocolEvent,
    ProtocolPlan,
    ProtocolStats,
    hold_phase_failure_curve,
    plan_protocol,
    run_protocol,
    run_trials,
)
from .uncertainty import (
    UncertaintyClass,
    UncertaintyWaveform,
    bang_bang,
    constant_axis,
    constant_xy,
    custom_sampled,
    no_uncertainty,
    phase_flip,
    random_waveform,
    sinusoid,
    uniform_noise,
)
from .worst_case import (
    CostateVector,
    WorstCaseResult,
    analytic_bangbang,
    brute_force_worst,
    compare_lemma1,
    compare_lemma2,
    evaluate_switching,
    failure_prob_bangbang,
    integrate_costate,
    switching_closed_form,
    theorem_bound_check,
)

__all__ = [
    "PureState",
    "BlochVector",
    "HamiltonianCoeffs",
    "SlidingModeConfig",
    "ZERO",
    "ONE",
    "PLUS",
    "NORTH",
    "to_bloch",
    "from_bloch",
    "sliding_mode_value",
    "failure_probability",
    "in_domain",
    "UncertaintyClass",
    "UncertaintyWaveform",
    "no_uncertainty",
    "constant_xy",
    "constant_axis",
    "bang_bang",
    "uniform_noise",
    "phase_flip",
    "custom_sampled",
    "sinusoid",
    "random_waveform",
    "IntegratorConfig",
    "Trajectory",
    "TrajectorySample",
    "propagate_bloch",
    "propagate_schrodinger",
    "exact_step_constant",
    "piecewise_curve",
    "propagate_piecewise",
    "LyapunovConfig",
    "ControlTrace",
    "DriveDesign",
    "DriveDesignError",
    "lyapunov_value",
    "control_value",
    "design_drive",
    "replay",
    "time_optimal_reference",
    "noise_tolerance",
    "Outcome",
    "MeasurementRecord",
    "RngStream",
    "measure_z",
    "born_probabilities",
    "PeriodDesign",
    "PeriodDomainError",
    "PeriodReport",
    "PeriodRule",
    "period_t1",
    "period_t2",
    "select_period",
    "default_grids",
    "verify_t2_geq_t1",
    "CostateVector",
    "WorstCaseResult",
    "analytic_bangbang",
    "failure_prob_bangbang",
    "integrate_costate",
    "evaluate_switching",
    "switching_closed_form",
    "brute_force_worst",
    "compare_lemma1",
    "compare_lemma2",
    "theorem_bound_check",
    "Phase",
    "ProtocolConfig",
    "ProtocolEvent",
    "ProtocolPlan",
    "ProtocolStats",
    "plan_protocol",
    "run_trials",
    "run_protocol",
    "hold_phase_failure_curve",
    "ConfigError",
    "load_config",
    "parse_config",
    "get_sliding_mode_config",
    "get_integrator_config",
    "get_lyapunov_config",
    "get_protocol_config",
    "get_batch_size",
    "get_control_trace",
    "write_trajectory_csv",
    "write_trace",
    "read_trace",
    "write_period_report",
    "write_worst_case_report",
    "write_protocol_csv",
    "write_protocol_summary",
    "per_cycle_failure_rate",
    "plot_series",
    "print_banner",
    "print_header",
    "print_step",
    "print_success",
    "print_info",
    "print_warning",
    "print_error",
    "print_kv",
    "print_check",
]

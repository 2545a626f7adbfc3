"""Measurement-period design.

T⁽¹⁾ bounds the failure probability for any uncertainty of norm ≤ ε;
T⁽²⁾ is the longer period valid when the uncertainty acts along a single
transverse axis and p0 does not exceed p′ = ε²/(1+ε²).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bloch import SlidingModeConfig
from .uncertainty import UncertaintyClass

VIOLATION_TOL = 1e-12
DOMAIN_SLACK = 1e-12


class PeriodDomainError(ValueError):
    """p0 lies above p′ = ε²/(1+ε²), where the single-axis formula is undefined."""


class PeriodRule(str, Enum):
    T1 = "T1-formula"
    T2 = "T2-formula"


@dataclass(frozen=True)
class PeriodDesign:
    T: float
    rule_used: PeriodRule
    p_threshold: float

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError(f"measurement period must be > 0, got {self.T}")


def _arccos(arg: float) -> float:
    return math.acos(min(1.0, max(-1.0, arg)))


def omega(eps: float) -> float:
    return math.sqrt(1.0 + eps * eps)


def period_t1(cfg: SlidingModeConfig) -> float:
    """T⁽¹⁾ = arccos(1 − 2p0)/ε."""
    return _arccos(1.0 - 2.0 * cfg.p0) / cfg.eps


def period_t2(cfg: SlidingModeConfig) -> float:
    """T⁽²⁾ = arccos[1 − 2(1 + 1/ε²)p0]/√(1+ε²)."""
    threshold = cfg.p_threshold
    if cfg.p0 > threshold * (1.0 + DOMAIN_SLACK):
        raise PeriodDomainError(
            f"p0={cfg.p0} exceeds p′=ε²/(1+ε²)={threshold:.6g} for eps={cfg.eps}; "
            "use the T1 formula for this configuration"
        )
    eps2 = cfg.eps * cfg.eps
    return _arccos(1.0 - 2.0 * (1.0 + 1.0 / eps2) * cfg.p0) / omega(cfg.eps)


def select_period(cfg: SlidingModeConfig, cls: UncertaintyClass) -> PeriodDesign:
    """Selection rule: T⁽²⁾ only for single-axis uncertainty with p0 ≤ p′."""
    cls = UncertaintyClass.parse(cls)
    threshold = cfg.p_threshold
    if cls.single_axis and cfg.p0 <= threshold:
        return PeriodDesign(period_t2(cfg), PeriodRule.T2, threshold)
    return PeriodDesign(period_t1(cfg), PeriodRule.T1, threshold)


# Auxiliary functions of the T⁽²⁾ ≥ T⁽¹⁾ argument. With x = (1−ε²)/(1+ε²),
# G(ε) = G̃(x) is the scaled gap ε·(T⁽²⁾ − T⁽¹⁾) at p0 = p′, and f is the
# derivative factor of F(p0) = T⁽²⁾ − T⁽¹⁾ on (0, p′).


def gap_function(cfg: SlidingModeConfig) -> float:
    """F(p0) = T⁽²⁾ − T⁽¹⁾."""
    return period_t2(cfg) - period_t1(cfg)


def gap_slope_factor(eps: float, p0: float) -> float:
    """f(p0) = 1/√(ε²p0 − (1+ε²)p0²) − 1/√(ε²p0 − ε²p0²)."""
    e2 = eps * eps
    return 1.0 / math.sqrt(e2 * p0 - (1.0 + e2) * p0 * p0) - 1.0 / math.sqrt(e2 * p0 - e2 * p0 * p0)


def boundary_gap(eps: float) -> float:
    """G(ε) = επ/√(1+ε²) − arccos((1−ε²)/(1+ε²))."""
    return eps * math.pi / omega(eps) - _arccos((1.0 - eps * eps) / (1.0 + eps * eps))


def boundary_gap_reduced(x: float) -> float:
    """G̃(x) = (π/√2)·√(1−x) − arccos x for x ∈ [−1, 1]."""
    return math.pi / math.sqrt(2.0) * math.sqrt(1.0 - x) - _arccos(x)


@dataclass(frozen=True)
class PeriodRow:
    eps: float
    p0: float
    t1: float
    t2: float

    @property
    def diff(self) -> float:
        return self.t2 - self.t1


@dataclass
class PeriodReport:
    rows: list[PeriodRow] = field(default_factory=list)
    violations: list[PeriodRow] = field(default_factory=list)
    boundary_errors: list[str] = field(default_factory=list)

    @property
    def min_diff(self) -> float:
        return min((row.diff for row in self.rows), default=math.nan)

    @property
    def passed(self) -> bool:
        return not self.violations and not self.boundary_errors


def default_grids(n_eps: int = 50, n_p0: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Log-spaced ε in [0.02, 2] and p0 fractions k/n_p0 of p′ (k = 1..n_p0)."""
    eps_grid = np.logspace(math.log10(0.02), math.log10(2.0), n_eps)
    fractions = np.arange(1, n_p0 + 1) / n_p0
    return eps_grid, fractions


def verify_t2_geq_t1(eps_grid, p0_grid, boundary_tol: float = 1e-7) -> PeriodReport:
    """Evaluate both periods on the grid and check T⁽²⁾ ≥ T⁽¹⁾.

    ``p0_grid`` entries are fractions of p′ in (0, 1], so every point lies in
    the validity domain of T⁽²⁾ for its ε. Also checks the boundary identities
    at p0 = p′ and the sign of the auxiliary functions.
    """
    report = PeriodReport()
    for eps in np.asarray(eps_grid, dtype=float):
        threshold = eps * eps / (1.0 + eps * eps)
        for fraction in np.asarray(p0_grid, dtype=float):
            if not 0.0 < fraction <= 1.0:
                raise ValueError(
                    f"p0 grid entries must be fractions of p′ in (0, 1], got {fraction}"
                )
            p0 = min(float(fraction) * threshold, threshold)
            cfg = SlidingModeConfig(p0, float(eps))
            row = PeriodRow(float(eps), p0, period_t1(cfg), period_t2(cfg))
            report.rows.append(row)
            if row.diff < -VIOLATION_TOL:
                report.violations.append(row)
            if fraction < 1.0 and gap_slope_factor(eps, p0) < 0.0:
                report.boundary_errors.append(f"f(p0) < 0 at eps={eps:.6g}, p0={p0:.6g}")

        at_threshold = SlidingModeConfig(threshold, float(eps))
        t2_expected = math.pi / omega(eps)
        t1_expected = _arccos((1.0 - eps * eps) / (1.0 + eps * eps)) / eps
        if abs(period_t2(at_threshold) - t2_expected) > boundary_tol:
            report.boundary_errors.append(f"T2(p′) != π/√(1+ε²) at eps={eps:.6g}")
        if abs(period_t1(at_threshold) - t1_expected) > boundary_tol:
            report.boundary_errors.append(f"T1(p′) mismatch at eps={eps:.6g}")
        if boundary_gap(eps) < -VIOLATION_TOL:
            report.boundary_errors.append(f"G(eps) < 0 at eps={eps:.6g}")
        x = (1.0 - eps * eps) / (1.0 + eps * eps)
        if abs(boundary_gap(eps) - boundary_gap_reduced(x)) > boundary_tol:
            report.boundary_errors.append(f"G(eps) != G̃(x) at eps={eps:.6g}")
    return report

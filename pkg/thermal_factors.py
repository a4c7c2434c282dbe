"""Thermal correction factors for perfect mirrors and first-order interplay functions.

This module handles:
- The reduced thermal argument alpha = pi*lambda_T/(2L)
- Closed-form series for eta_F^T, eta_E^T, phi_F and phi_E
- The analytic deviation functions Delta_F and Delta_E
- The wavevector-integral form of eta_F^T used as a cross-check

Per-term summands are evaluated from e^(-2x)-factored forms (no cosh/sinh
overflow) and from Taylor series below x = 0.1, where the 1/x^4 pieces cancel.
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import Dict

import numpy as np

from exceptions import DomainError
from quadrature import (
    DEFAULT_SPEC,
    ConvergenceReport,
    PowerLawTail,
    QuadratureSpec,
    integrate_oscillatory,
    sum_power_tail,
    sum_series,
)

# Setup logging
logger = logging.getLogger(__name__)

_SERIES_BELOW = 0.1


@dataclass(frozen=True)
class ThermalArgument:
    """alpha = pi*lambda_T/(2L); alpha = inf stands for zero temperature."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"Thermal argument must be positive, got {self.alpha!r}")

    @property
    def is_cold(self) -> bool:
        return math.isinf(self.alpha)

    @property
    def lt(self) -> float:
        """lambda_T / L."""
        return 2.0 * self.alpha / math.pi

    @classmethod
    def from_lengths(cls, L: float, lambda_T: float) -> "ThermalArgument":
        if not (L > 0 and lambda_T > 0):
            raise DomainError(f"L and lambda_T must be positive, got L={L!r}, lambda_T={lambda_T!r}")
        return cls(math.pi * lambda_T / (2.0 * L))

    @classmethod
    def from_ratio(cls, lt: float) -> "ThermalArgument":
        return cls(math.pi * lt / 2.0)

    @classmethod
    def from_cavity(cls, cav) -> "ThermalArgument":
        """Thermal argument of a CavityState; a cold cavity gives alpha = inf."""
        return cls.from_ratio(cav.lt)


def _split(x):
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_BELOW
    safe = np.where(small, 1.0, x)
    q = np.exp(-2.0 * safe)
    one_minus_q = -np.expm1(-2.0 * safe)
    return x, small, safe, q, one_minus_q


def force_summand(x):
    """1/x^4 - cosh(x)/(x sinh^3(x))."""
    x, small, safe, q, omq = _split(x)
    closed = 1.0 / safe ** 4 - 4.0 * q * (1.0 + q) / (safe * omq ** 3)
    x2 = x * x
    series = 1.0 / 15.0 - 4.0 * x2 / 189.0 + x2 * x2 / 225.0 - 8.0 * x2 ** 3 / 10395.0
    return np.where(small, series, closed)


def energy_summand(x):
    """-2/x^4 + 1/(x^3 tanh(x)) + 1/(x^2 sinh^2(x))."""
    x, small, safe, q, omq = _split(x)
    closed = -2.0 / safe ** 4 + (1.0 + q) / (omq * safe ** 3) + 4.0 * q / (omq ** 2 * safe ** 2)
    x2 = x * x
    series = 2.0 / 45.0 - 8.0 * x2 / 945.0 + 2.0 * x2 * x2 / 1575.0 - 16.0 * x2 ** 3 / 93555.0
    return np.where(small, series, closed)


def edge_summand(x):
    """6/x^4 - (2 + 4 cosh^2(x))/sinh^4(x), the piece of the phi_F summand beyond energy - 4*force."""
    x, small, safe, q, omq = _split(x)
    closed = 6.0 / safe ** 4 - 96.0 * q * q / omq ** 4 - 16.0 * q / omq ** 2
    x2 = x * x
    series = -2.0 / 15.0 + 8.0 * x2 / 63.0 - 2.0 * x2 * x2 / 45.0 + 16.0 * x2 ** 3 / 1485.0
    return np.where(small, series, closed)


def phi_F_summand(x):
    """Summand of phi_F: coth/x^3 + 1/(x^2 sinh^2) + 4 cosh/(x sinh^3) - (2 + 4 cosh^2)/sinh^4."""
    return energy_summand(x) - 4.0 * force_summand(x) + edge_summand(x)


def phi_E_summand(x):
    """Summand of phi_E: -4/x^4 + coth/x^3 + 1/(x^2 sinh^2) + 2 cosh/(x sinh^3)."""
    return energy_summand(x) - 2.0 * force_summand(x)


def _tail(alpha: float, coefficients: Dict[int, float]) -> PowerLawTail:
    return PowerLawTail({p: c / alpha ** p for p, c in coefficients.items()})


def _thermal_sum(a: ThermalArgument, summand, coefficients: Dict[int, float], spec: QuadratureSpec, name: str) -> float:
    alpha = a.alpha
    report = sum_series(lambda m: summand(alpha * m), spec, _tail(alpha, coefficients))
    logger.debug(f"{name}(alpha={alpha:.6g}): {report.evaluations} terms, est_error={report.est_error:.2e}")
    return report.require(f"{name}(alpha={alpha})")


def eta_F_T(a: ThermalArgument, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Thermal correction to the force between perfect mirrors, 1 + 30 sum force_summand(alpha m)."""
    if a.is_cold:
        return 1.0
    return 1.0 + 30.0 * _thermal_sum(a, force_summand, {4: 1.0}, spec, "eta_F_T")


def eta_E_T(a: ThermalArgument, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Thermal correction to the free energy between perfect mirrors, 1 + 45 sum energy_summand(alpha m)."""
    if a.is_cold:
        return 1.0
    return 1.0 + 45.0 * _thermal_sum(a, energy_summand, {3: 1.0, 4: -2.0}, spec, "eta_E_T")


def phi_F(a: ThermalArgument, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """First-order (in lambda_P/L) interplay function of the force, independent of lambda_P."""
    if a.is_cold:
        return 0.0
    return 15.0 / math.pi * _thermal_sum(a, phi_F_summand, {3: 1.0}, spec, "phi_F")


def phi_E(a: ThermalArgument, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """First-order (in lambda_P/L) interplay function of the free energy."""
    if a.is_cold:
        return 0.0
    return 45.0 / math.pi * _thermal_sum(a, phi_E_summand, {3: 1.0, 4: -4.0}, spec, "phi_E")


def _deviation(L: float, lambda_T: float, slope: float, eta_fn, phi_fn, spec: QuadratureSpec) -> float:
    if not L > 0:
        raise DomainError(f"L must be positive, got {L!r}")
    if math.isinf(lambda_T):
        return 0.0
    a = ThermalArgument.from_lengths(L, lambda_T)
    lt = lambda_T / L
    eta = eta_fn(a, spec)
    return slope * lt * (eta - 1.0) / eta + lt * phi_fn(a, spec) / eta


def Delta_F_analytic(L: float, lambda_T: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Analytic deviation function of the force, (8/3pi) lt (eta_F^T-1)/eta_F^T + lt phi_F/eta_F^T.

    Meaningful for lambda_P << lambda_T; lambda_T = inf (T = 0) gives 0.
    """
    return _deviation(L, lambda_T, 8.0 / (3.0 * math.pi), eta_F_T, phi_F, spec)


def Delta_E_analytic(L: float, lambda_T: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Analytic deviation function of the energy, (2/pi) lt (eta_E^T-1)/eta_E^T + lt phi_E/eta_E^T."""
    return _deviation(L, lambda_T, 2.0 / math.pi, eta_E_T, phi_E, spec)


def term_spec(spec: QuadratureSpec) -> QuadratureSpec:
    """Tolerances for a single term of a slowly converging m-series."""
    return replace(spec, abs_tol=spec.abs_tol * 1e-2, rel_tol=spec.rel_tol * 1e-1)


def eta_F_T_integral_report(a: ThermalArgument, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """eta_F^T as 1 + (480/pi^4) sum_m int du u^2 sin(k u)/(k (e^(2u) - 1)), k = m lambda_T/L."""
    if a.is_cold:
        return ConvergenceReport(1.0, 0.0, 0, True)
    lt = a.lt
    inner = term_spec(spec)

    def term(m: int) -> float:
        k = m * lt

        def integrand(u: np.ndarray) -> np.ndarray:
            with np.errstate(over="ignore"):
                return u * u * np.sin(k * u) / (k * np.expm1(2.0 * u))

        report = integrate_oscillatory(integrand, 2.0 * math.pi / k, inner, first_zero=math.pi / k)
        if not report.converged:
            logger.warning(f"eta_F_T_integral: term m={m} did not converge (est_error={report.est_error:.2e})")
        return report.value

    min_terms = max(8, math.ceil(10.0 / a.alpha))
    report = sum_power_tail(term, spec, powers=(4, 5, 6), min_terms=min_terms)
    return report.scaled(480.0 / math.pi ** 4, offset=1.0)


def eta_F_T_integral(a: ThermalArgument, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Wavevector-integral evaluation of eta_F^T, the cross-check of the closed-form series."""
    return eta_F_T_integral_report(a, spec).require(f"eta_F_T_integral(alpha={a.alpha})")

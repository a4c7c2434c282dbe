"""Zero-temperature conductivity correction factors.

This module handles:
- eta_F^P through the one-dimensional form left after the analytic y-integration
- eta_F^P through the raw (u, y) double integral, as an independent check
- eta_E^P by integrating eta_F^P over the mirror distance
- Long-distance expansions and the short-distance coefficient
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from exceptions import DomainError
from plasma_optics import mode_sum, one_minus_rho_of_ratio, reduced_ratio, rho_of_ratio
from quadrature import (
    DEFAULT_SPEC,
    ConvergenceReport,
    QuadratureSpec,
    integrate_energy_factor,
    integrate_semi_infinite,
    integrate_unit,
)

# Setup logging
logger = logging.getLogger(__name__)

FORCE_PREFACTOR = 120.0 / math.pi ** 4

# Below this argument h(w) - 1 is evaluated from its power series
_H_SERIES_LIMIT = 1e-3


@dataclass(frozen=True)
class VacuumReducedIntegrand:
    """Intermediate quantities of the analytically y-integrated force kernel.

    Attributes:
        u: Reduced wavevector kappa*L
        rho: Reduced reflection variable
        g: TM excess over the TE contribution
        a_plus: 1/sqrt(w_plus)
        a_minus: 1/sqrt(w_minus)
    """

    u: np.ndarray
    rho: np.ndarray
    g: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray


def _h_minus_one(w: np.ndarray) -> np.ndarray:
    """(1 + w) * arctan(sqrt(w))/sqrt(w) - 1, with arctan(1/a) taken as atan2(1, a)."""
    w = np.asarray(w, dtype=float)
    series = np.zeros_like(w)
    power = np.ones_like(w)
    for n in range(1, 7):
        power = power * w
        series = series + (-1) ** (n + 1) * 2.0 * power / ((2 * n - 1) * (2 * n + 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(w)
        closed = (w + 1.0) / root * np.arctan2(1.0, 1.0 / root) - 1.0
    return np.where(w < _H_SERIES_LIMIT, series, closed)


def reduced_integrand(u, lp: float) -> VacuumReducedIntegrand:
    """Quantities entering the y-integrated force kernel at u = kappa*L.

    The rho -> 1 end (short wavevectors or lp -> 0) needs no special case:
    1 - rho is formed without cancellation and small arguments of h fall on
    its series branch.
    """
    u = np.asarray(u, dtype=float)
    s = reduced_ratio(u, lp)
    rho_value = np.asarray(rho_of_ratio(s))
    omr = np.asarray(one_minus_rho_of_ratio(s))
    x = np.exp(-u)
    with np.errstate(divide="ignore"):
        w_plus = (1.0 - rho_value * x) * omr / (2.0 * rho_value * (1.0 + x))
        w_minus = (1.0 + rho_value * x) * omr / (2.0 * rho_value * -np.expm1(-u))
        a_plus = 1.0 / np.sqrt(w_plus)
        a_minus = 1.0 / np.sqrt(w_minus)
    g = _h_minus_one(w_minus) - _h_minus_one(w_plus)
    return VacuumReducedIntegrand(u=u, rho=rho_value, g=g, a_plus=a_plus, a_minus=a_minus)


def _force_kernel(u: np.ndarray, lp: float) -> np.ndarray:
    """u^3 * int_0^1 f dy = u^3 [2 rho^2 x^2 + rho x g]/(1 - rho^2 x^2), x = e^(-u)."""
    reduced = reduced_integrand(u, lp)
    rho_value = reduced.rho
    omr = np.asarray(one_minus_rho_of_ratio(reduced_ratio(u, lp)))
    x = np.exp(-u)
    denominator = omr * (1.0 + rho_value) + rho_value ** 2 * -np.expm1(-2.0 * u)
    return u ** 3 * (2.0 * rho_value ** 2 * x * x + rho_value * x * reduced.g) / denominator


def _check_lp(lp: float) -> None:
    if not (lp >= 0 and math.isfinite(lp)):
        raise DomainError(f"lambda_P/L must be non-negative and finite, got {lp!r}")


def eta_F_P_report(lp: float, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """ConvergenceReport for eta_F^P(lp); lp = 0 is the perfect mirror (exactly 1)."""
    _check_lp(lp)
    if lp == 0:
        return ConvergenceReport(1.0, 0.0, 0, True)
    report = integrate_semi_infinite(lambda u: _force_kernel(u, lp), 1.0, spec)
    return report.scaled(FORCE_PREFACTOR)


def eta_F_P(lp: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Vacuum conductivity correction to the force, eta_F^P(lambda_P/L), in (0, 1].

    Args:
        lp: lambda_P / L
        spec: Quadrature tolerances

    Returns:
        float: eta_F^P
    """
    return eta_F_P_report(lp, spec).require(f"eta_F_P(lp={lp})")


def eta_F_P_2d(lp: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """eta_F^P from the raw double integral (120/pi^4) int du u^3 int_0^1 dy f(u, y)."""
    _check_lp(lp)
    if lp == 0:
        return 1.0
    failures = []

    def outer(u: np.ndarray) -> np.ndarray:
        out = np.empty_like(u)
        for i, ui in enumerate(u.tolist()):
            inner = integrate_unit(lambda y: mode_sum(ui, y, lp), spec)
            if not inner.converged:
                failures.append(ui)
            out[i] = ui ** 3 * inner.value
        return out

    report = integrate_semi_infinite(outer, 1.0, spec)
    if failures:
        logger.warning(f"eta_F_P_2d: {len(failures)} inner y-integrals did not converge (lp={lp})")
    return report.scaled(FORCE_PREFACTOR).require(f"eta_F_P_2d(lp={lp})")


def eta_E_P_report(lp: float, spec: QuadratureSpec = DEFAULT_SPEC, audit: bool = False) -> ConvergenceReport:
    """ConvergenceReport for eta_E^P = 3 int_0^1 tau^2 eta_F^P(lp*tau) dtau (truncated at 1e-4)."""
    _check_lp(lp)
    if lp == 0:
        return ConvergenceReport(1.0, 0.0, 0, True)
    return integrate_energy_factor(lambda tau: eta_F_P(lp * tau, spec), spec, audit=audit)


def eta_E_P(lp: float, spec: QuadratureSpec = DEFAULT_SPEC, audit: bool = False) -> float:
    """Vacuum conductivity correction to the energy, eta_E^P(lambda_P/L)."""
    return eta_E_P_report(lp, spec, audit).require(f"eta_E_P(lp={lp})")


def eta_F_P_asymptotic(lp: float) -> float:
    """Long-distance expansion 1 - (8/(3 pi)) lp of eta_F^P."""
    _check_expansion(lp)
    return 1.0 - 8.0 / (3.0 * math.pi) * lp


def eta_E_P_asymptotic(lp: float) -> float:
    """Long-distance expansion 1 - (2/pi) lp of eta_E^P."""
    _check_expansion(lp)
    return 1.0 - 2.0 / math.pi * lp


def _check_expansion(lp: float) -> None:
    if not 0 <= lp < 1:
        raise DomainError(f"The long-distance expansion needs 0 <= lambda_P/L < 1, got {lp!r}")


def short_distance_integrand(K):
    """sqrt(2) K^2 e^(-K) [1/sqrt(1 - e^(-K)) - 1/sqrt(1 + e^(-K))].

    Same function as e^(-3K/4) K^2 [sinh(K/2)^(-1/2) - cosh(K/2)^(-1/2)],
    without overflow at large K.
    """
    K = np.asarray(K, dtype=float)
    decay = np.exp(-K)
    with np.errstate(divide="ignore", invalid="ignore"):
        bracket = 1.0 / np.sqrt(-np.expm1(-K)) - 1.0 / np.sqrt(1.0 + decay)
        out = math.sqrt(2.0) * K * K * decay * bracket
    return np.where(K > 0, out, 0.0)


def short_distance_coefficient(spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Coefficient of eta_F^P ~ coefficient * L/lambda_P at short distances (about 1.193)."""
    report = integrate_semi_infinite(short_distance_integrand, 0.5, spec)
    return report.scaled(30.0 / math.pi ** 2).require("short_distance_coefficient")

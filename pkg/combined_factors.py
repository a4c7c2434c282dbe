"""Combined finite-temperature, finite-conductivity Casimir force and free energy.

This module handles:
- The force as a Matsubara sum (production path) and as a Poisson-resummed
  sum of oscillatory frequency integrals (validation path)
- A first-order low-temperature form that stands in for the Matsubara sum
  at large lambda_T/L
- The free energy from the distance integral of the force, and from the
  Lifshitz formula as an independent path
- Correction bundles (eta, delta, rescaled Delta) at one distance
- The exact remainder of the additive decomposition and the factorized estimate
- Parallel sweeps over cavities

Every core works on the dimensionless pair lp = lambda_P/L, lt = lambda_T/L;
the SI operations multiply by the ideal force or energy of the cavity.
"""

import math
import logging
import concurrent.futures as futures
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from constants import CavityState
from exceptions import CasimirError, DomainError
from plasma_optics import log_mode_sum, mode_sum, polarization_terms
from quadrature import (
    DEFAULT_SPEC,
    ConvergenceReport,
    QuadratureSpec,
    integrate_energy_factor,
    integrate_oscillatory,
    integrate_semi_infinite,
    sum_power_tail,
)
from thermal_factors import (
    Delta_E_analytic,
    Delta_F_analytic,
    ThermalArgument,
    eta_E_T,
    eta_F_T,
    phi_E,
    phi_F,
    term_spec,
)
from vacuum_factors import eta_E_P_report, eta_F_P_report

# Setup logging
logger = logging.getLogger(__name__)

MODES = ("fast", "validation")

# Matsubara terms are dropped once 2*xi_k exceeds this (kernel bounded by e^(-2 xi))
MATSUBARA_CUTOFF = 46.0

# lambda_T/L from which the force and energy are first tried in the low-temperature form
LOW_TEMPERATURE_LT = 1000.0

# Ratio lambda_P/lambda_T above which first-order deviation results get a warning
DEVIATION_WARNING_RATIO = 0.2

# Points per panel of the composite Gauss-Legendre rule for the y-integral
_GL_POINTS = 20
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_POINTS)

# Kernels of the frequency integrals, as functions of (u, y, lp)
_FORCE_KERNEL = "force"
_ENERGY_KERNEL = "energy"


def _kernel(kind: str, lp: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    if kind == _FORCE_KERNEL:
        return lambda u, y: u * u * mode_sum(u, y, lp)
    return lambda u, y: 0.5 * u * log_mode_sum(u, y, lp)


def _matsubara_report(lp: float, lt: float, spec: QuadratureSpec, kind: str) -> ConvergenceReport:
    """prefactor/lt * [K(0) + 2 sum_k K(xi_k)], K(xi) = int_xi^inf kernel(u, xi/u) du, xi_k = 2 pi k/lt.

    The zero-frequency term carries weight 1/2 relative to the others and is
    evaluated with the exact omega = 0 amplitudes (y = 0).
    """
    kernel = _kernel(kind, lp)
    prefactor = (120.0 if kind == _FORCE_KERNEL else 360.0) / (math.pi ** 3 * lt)
    expected_terms = int(MATSUBARA_CUTOFF * lt / (4.0 * math.pi)) + 2
    inner = replace(spec, abs_tol=spec.abs_tol / expected_terms)

    def frequency_integral(xi: float) -> ConvergenceReport:
        return integrate_semi_infinite(lambda u: kernel(u, xi / u), 1.0, inner, lower=xi)

    zero = frequency_integral(0.0)
    values = [zero.value]
    errors = [zero.est_error]
    evaluations = zero.evaluations
    converged = zero.converged
    terminated = False

    for k in range(1, spec.series_max_terms + 1):
        xi = 2.0 * math.pi * k / lt
        report = frequency_integral(xi)
        values.append(2.0 * report.value)
        errors.append(2.0 * report.est_error)
        evaluations += report.evaluations
        converged &= report.converged
        if 2.0 * xi > MATSUBARA_CUTOFF and abs(values[-1]) <= spec.series_rel_tol * abs(math.fsum(values)):
            terminated = True
            break

    total = prefactor * math.fsum(values)
    est_error = prefactor * (math.fsum(errors) + abs(values[-1]))
    logger.debug(f"Matsubara {kind} sum (lp={lp:.4g}, lt={lt:.4g}): {len(values)} frequencies, value={total:.12g}")
    return ConvergenceReport(total, est_error, evaluations, converged and terminated)


def _low_temperature_report(lp: float, lt: float, spec: QuadratureSpec, kind: str) -> ConvergenceReport:
    """eta^P + (eta^T - 1) + lp*phi: the additive decomposition with the remainder at first order in lp.

    Every thermal term falls off as a power of L/lambda_T. The neglected
    higher orders of the remainder are estimated as min(lp, 1) times the size
    of the thermal terms; the report is converged only when that estimate
    is within tolerance.
    """
    a = ThermalArgument.from_ratio(lt)
    if kind == _FORCE_KERNEL:
        vacuum = eta_F_P_report(lp, spec)
        thermal = eta_F_T(a, spec) - 1.0
        first_order = lp * phi_F(a, spec)
    else:
        vacuum = eta_E_P_report(lp, spec)
        thermal = eta_E_T(a, spec) - 1.0
        first_order = lp * phi_E(a, spec)
    value = vacuum.value + thermal + first_order
    est_error = vacuum.est_error + min(lp, 1.0) * (abs(thermal) + abs(first_order))
    converged = vacuum.converged and est_error <= spec.tolerance(value)
    logger.debug(f"Low-temperature {kind} form (lp={lp:.4g}, lt={lt:.4g}): value={value:.12g}, "
                 f"est_error={est_error:.2e}, converged={converged}")
    return ConvergenceReport(value, est_error, vacuum.evaluations, converged)


def _thermal_report(lp: float, lt: float, spec: QuadratureSpec, kind: str) -> ConvergenceReport:
    """Finite-temperature factor: the low-temperature form when it is accurate enough, else the Matsubara sum."""
    if lt >= LOW_TEMPERATURE_LT:
        report = _low_temperature_report(lp, lt, spec, kind)
        if report.converged:
            return report
        logger.debug(f"Low-temperature {kind} form not accurate enough at lt={lt:.4g}; summing Matsubara terms")
    return _matsubara_report(lp, lt, spec, kind)


def _check_ratios(lp: float, lt: float) -> None:
    if not (lp >= 0 and math.isfinite(lp)):
        raise DomainError(f"lambda_P/L must be non-negative and finite, got {lp!r}")
    if not lt > 0:
        raise DomainError(f"lambda_T/L must be positive (inf for T = 0), got {lt!r}")


def _exact(value: float) -> ConvergenceReport:
    return ConvergenceReport(value, 0.0, 0, True)


def eta_F_matsubara(lp: float, lt: float, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """Force correction factor eta_F(lp, lt) from the Matsubara sum.

    T = 0 (lt = inf) routes to eta_F^P and lambda_P = 0 to eta_F^T. From
    lt = LOW_TEMPERATURE_LT on, the low-temperature form replaces the sum
    whenever its error estimate is within tolerance.
    """
    _check_ratios(lp, lt)
    if math.isinf(lt):
        return eta_F_P_report(lp, spec)
    if lp == 0:
        return _exact(eta_F_T(ThermalArgument.from_ratio(lt), spec))
    return _thermal_report(lp, lt, spec, _FORCE_KERNEL)


def eta_E_lifshitz(lp: float, lt: float, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """Energy correction factor from the Lifshitz free energy, distance integral done analytically."""
    _check_ratios(lp, lt)
    if math.isinf(lt):
        return eta_E_P_report(lp, spec)
    if lp == 0:
        return _exact(eta_E_T(ThermalArgument.from_ratio(lt), spec))
    return _thermal_report(lp, lt, spec, _ENERGY_KERNEL)


def eta_E_profile(lp: float, lt: float, spec: QuadratureSpec = DEFAULT_SPEC, audit: bool = False) -> ConvergenceReport:
    """Energy correction factor 3 int tau^2 eta_F(lp tau, lt tau) dtau, the integral of the force over distance."""
    _check_ratios(lp, lt)
    if math.isinf(lt):
        return eta_E_P_report(lp, spec, audit)
    if lp == 0:
        return _exact(eta_E_T(ThermalArgument.from_ratio(lt), spec))

    def force_factor(tau: float) -> float:
        return eta_F_matsubara(lp * tau, lt * tau, spec).require(f"eta_F(lp={lp * tau:.6g}, lt={lt * tau:.6g})")

    return integrate_energy_factor(force_factor, spec, audit=audit)


@lru_cache(maxsize=64)
def _composite_legendre(panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [0, 1]."""
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    centre = 0.5 * (edges[:-1] + edges[1:])
    nodes = (centre[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _poisson_integrand(lp: float, k: float, deficit: bool) -> Callable[[np.ndarray], np.ndarray]:
    """u^3 int_0^1 cos(k u y) F(u, y) dy for F = f (full kernel) or the deficit f - f_perfect.

    The TE part is y-independent and integrates to a sinc; the TM part uses a
    composite Gauss-Legendre rule with about two oscillations per panel.
    """

    def integrand(u: np.ndarray) -> np.ndarray:
        panels = 2 + int(k * float(np.max(u)) / (4.0 * math.pi))
        nodes, weights = _composite_legendre(panels)
        te, tm = polarization_terms(u[:, None], nodes[None, :], lp, deficit)
        perp = te[:, 0]
        par = (tm * np.cos(k * u[:, None] * nodes[None, :])) @ weights
        return u ** 3 * (perp * np.sinc(k * u / math.pi) + par)

    return integrand


def _poisson_series(lp: float, lt: float, spec: QuadratureSpec, deficit: bool) -> ConvergenceReport:
    """(240/pi^4) sum_{m>=1} int du u^3 int dy cos(m lt u y) F, summed with a fitted power-law tail."""
    inner = term_spec(spec)
    label = "remainder" if deficit else "force"

    def term(m: int) -> float:
        k = m * lt
        report = integrate_oscillatory(
            _poisson_integrand(lp, k, deficit), 2.0 * math.pi / k, inner, first_zero=math.pi / k
        )
        if not report.converged:
            logger.warning(f"Poisson {label} term m={m} (lp={lp:.4g}, lt={lt:.4g}) did not converge")
        return report.value

    alpha = math.pi * lt / 2.0
    min_terms = max(8, math.ceil(10.0 / alpha))
    report = sum_power_tail(term, spec, powers=(3, 4, 5), min_terms=min_terms)
    return report.scaled(240.0 / math.pi ** 4)


def eta_F_poisson(lp: float, lt: float, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """Force correction factor from the Poisson form: eta_F^P plus the m >= 1 oscillatory terms."""
    _check_ratios(lp, lt)
    if math.isinf(lt):
        return eta_F_P_report(lp, spec)
    if lp == 0:
        return _exact(eta_F_T(ThermalArgument.from_ratio(lt), spec))
    vacuum = eta_F_P_report(lp, spec)
    thermal = _poisson_series(lp, lt, spec, deficit=False)
    return ConvergenceReport(
        value=vacuum.value + thermal.value,
        est_error=vacuum.est_error + thermal.est_error,
        evaluations=vacuum.evaluations + thermal.evaluations,
        converged=vacuum.converged and thermal.converged,
    )


def remainder_from_ratios(lp: float, lt: float, spec: QuadratureSpec = DEFAULT_SPEC) -> ConvergenceReport:
    """Remainder Delta eta_F = eta_F - eta_F^P - (eta_F^T - 1) from the Poisson terms of f - f_perfect."""
    _check_ratios(lp, lt)
    if math.isinf(lt) or lp == 0:
        return _exact(0.0)
    return _poisson_series(lp, lt, spec, deficit=True)


def force_matsubara(cav: CavityState, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Casimir force in newtons from the Matsubara sum.

    Args:
        cav: Cavity geometry, mirror and temperature
        spec: Quadrature tolerances

    Returns:
        float: Attractive force magnitude in N
    """
    eta = eta_F_matsubara(cav.lp, cav.lt, spec).require(f"force_matsubara(L={cav.L})")
    return eta * cav.ideal_force


def force_poisson(cav: CavityState, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Casimir force in newtons from the Poisson-resummed representation."""
    eta = eta_F_poisson(cav.lp, cav.lt, spec).require(f"force_poisson(L={cav.L})")
    return eta * cav.ideal_force


def energy(cav: CavityState, spec: QuadratureSpec = DEFAULT_SPEC, audit: bool = False) -> float:
    """Casimir free energy in joules as the integral of the force from L to 1e4 L.

    With audit=True a 100x extension of the upper limit must move the result
    by less than 1e-7 relative, otherwise ConvergenceError is raised.
    """
    eta = eta_E_profile(cav.lp, cav.lt, spec, audit).require(f"energy(L={cav.L})")
    return eta * cav.ideal_energy


def energy_lifshitz(cav: CavityState, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Casimir free energy in joules from the Lifshitz formula."""
    eta = eta_E_lifshitz(cav.lp, cav.lt, spec).require(f"energy_lifshitz(L={cav.L})")
    return eta * cav.ideal_energy


def remainder_delta_eta_F(cav: CavityState, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Exact remainder Delta eta_F of eta_F = eta_F^P + (eta_F^T - 1) + Delta eta_F."""
    return remainder_from_ratios(cav.lp, cav.lt, spec).require(f"remainder_delta_eta_F(L={cav.L})")


def factorized_estimate(eta_P: float, eta_T: float, lp_over_lt: float, Delta: float) -> float:
    """Corrected product estimate eta^P * eta^T * (1 + (lambda_P/lambda_T) * Delta)."""
    for name, value in (("eta_P", eta_P), ("eta_T", eta_T), ("lp_over_lt", lp_over_lt), ("Delta", Delta)):
        if not math.isfinite(value):
            raise DomainError(f"factorized_estimate needs finite {name}, got {value!r}")
    return eta_P * eta_T * (1.0 + lp_over_lt * Delta)


@dataclass(frozen=True)
class CorrectionBundle:
    """All correction factors of one cavity.

    delta = eta/(eta^P eta^T) - 1 and Delta = (lambda_T/lambda_P) delta are
    computed from the unrounded stored factors.
    """

    eta_F: float
    eta_F_P: float
    eta_F_T: float
    delta_F: float
    Delta_F_rescaled: float
    eta_E: float
    eta_E_P: float
    eta_E_T: float
    delta_E: float
    Delta_E_rescaled: float
    force: float
    energy: float
    L_m: float
    lambda_P_m: float
    T_K: float
    mode: str = "fast"
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record["Delta_F"] = record.pop("Delta_F_rescaled")
        record["Delta_E"] = record.pop("Delta_E_rescaled")
        record["warnings"] = "; ".join(self.warnings)
        return record


def _rescaled(delta: float, cav: CavityState, analytic: Callable[[], float]) -> float:
    """(lambda_T/lambda_P) delta with its exact limits at lambda_P = 0 and T = 0."""
    if math.isinf(cav.lt):
        return 0.0
    if cav.lp == 0:
        return analytic()
    return cav.lt / cav.lp * delta


def correction_bundle(cav: CavityState, spec: QuadratureSpec = DEFAULT_SPEC, mode: str = "fast") -> CorrectionBundle:
    """Compute every force and energy correction factor at one cavity.

    In fast mode eta_E comes from the Lifshitz formula. In validation mode
    it comes from the distance integral of the force with the truncation
    audit, and the Lifshitz value is kept as a cross-check.

    Args:
        cav: Cavity geometry, mirror and temperature
        spec: Quadrature tolerances
        mode: 'fast' or 'validation'

    Returns:
        CorrectionBundle: Factors, deviations, force and energy
    """
    if mode not in MODES:
        raise DomainError(f"Unknown mode {mode!r}; expected one of {MODES}")
    lp, lt = cav.lp, cav.lt
    thermal = ThermalArgument.from_ratio(lt) if math.isfinite(lt) else ThermalArgument(math.inf)
    notes: List[str] = []

    eta_F_P_value = eta_F_P_report(lp, spec).require("eta_F_P")
    eta_F_T_value = eta_F_T(thermal, spec)
    eta_F_value = eta_F_matsubara(lp, lt, spec).require("eta_F")

    audit = mode == "validation"
    eta_E_P_value = eta_E_P_report(lp, spec, audit).require("eta_E_P")
    eta_E_T_value = eta_E_T(thermal, spec)
    if audit:
        eta_E_value = eta_E_profile(lp, lt, spec, audit=True).require("eta_E")
        lifshitz = eta_E_lifshitz(lp, lt, spec).require("eta_E (Lifshitz)")
        if abs(lifshitz - eta_E_value) > 1e-6 * abs(eta_E_value):
            notes.append(f"energy paths differ: distance integral {eta_E_value:.10g} vs Lifshitz {lifshitz:.10g}")
    else:
        eta_E_value = eta_E_lifshitz(lp, lt, spec).require("eta_E")

    delta_F = eta_F_value / (eta_F_P_value * eta_F_T_value) - 1.0
    delta_E = eta_E_value / (eta_E_P_value * eta_E_T_value) - 1.0
    Delta_F = _rescaled(delta_F, cav, lambda: Delta_F_analytic(cav.L, cav.env.lambda_T, spec))
    Delta_E = _rescaled(delta_E, cav, lambda: Delta_E_analytic(cav.L, cav.env.lambda_T, spec))

    if math.isfinite(lt) and lp / lt > DEVIATION_WARNING_RATIO:
        notes.append(
            f"lambda_P/lambda_T = {lp / lt:.3g} exceeds {DEVIATION_WARNING_RATIO}; "
            "deviation functions are first order in this ratio"
        )
    for note in notes:
        logger.warning(f"L={cav.L:.4g} m, lambda_P={cav.mirror.lambda_P:.4g} m: {note}")

    return CorrectionBundle(
        eta_F=eta_F_value,
        eta_F_P=eta_F_P_value,
        eta_F_T=eta_F_T_value,
        delta_F=delta_F,
        Delta_F_rescaled=Delta_F,
        eta_E=eta_E_value,
        eta_E_P=eta_E_P_value,
        eta_E_T=eta_E_T_value,
        delta_E=delta_E,
        Delta_E_rescaled=Delta_E,
        force=eta_F_value * cav.ideal_force,
        energy=eta_E_value * cav.ideal_energy,
        L_m=cav.L,
        lambda_P_m=cav.mirror.lambda_P,
        T_K=cav.env.T,
        mode=mode,
        warnings=tuple(notes),
    )


@dataclass(frozen=True)
class SweepResult:
    """One sweep entry: the bundle, or the error that prevented it."""

    cavity: CavityState
    bundle: Optional[CorrectionBundle]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.bundle is not None


def _evaluate_sweep_point(job: Tuple[CavityState, QuadratureSpec, str]) -> SweepResult:
    cav, spec, mode = job
    try:
        return SweepResult(cav, correction_bundle(cav, spec, mode))
    except CasimirError as e:
        logger.warning(f"Sweep point L={cav.L:.6g} m, lambda_P={cav.mirror.lambda_P:.6g} m failed: {e}")
        return SweepResult(cav, None, str(e))


def sweep(
    cavities: Sequence[CavityState],
    spec: QuadratureSpec = DEFAULT_SPEC,
    mode: str = "fast",
    max_workers: int = 1,
) -> List[SweepResult]:
    """Correction bundles for many cavities, in input order.

    Points are independent; with max_workers > 1 they run in a process pool.
    A point that fails numerically is reported in its entry and does not
    abort the sweep.
    """
    if not cavities:
        raise DomainError("sweep needs at least one cavity")
    if mode not in MODES:
        raise DomainError(f"Unknown mode {mode!r}; expected one of {MODES}")
    jobs = [(cav, spec, mode) for cav in cavities]
    logger.info(f"Sweeping {len(jobs)} cavities (mode={mode}, workers={max_workers})")

    if max_workers <= 1 or len(jobs) == 1:
        results = [_evaluate_sweep_point(job) for job in jobs]
    else:
        with futures.ProcessPoolExecutor(max_workers=max_workers) as executor:
            results = list(executor.map(_evaluate_sweep_point, jobs))

    failed = sum(not r.ok for r in results)
    if failed:
        logger.warning(f"{failed} of {len(results)} sweep points failed")
    return results

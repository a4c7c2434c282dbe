"""Built-in validation suite for the Casimir toolkit.

This module handles:
- Reference checks of the constants and ideal force/energy
- Table values of the thermal, vacuum and combined correction factors
- Series vs integral forms of the thermal factors
- Cross-checks between independent numerical paths (validation mode)
- Limit, scale-invariance, deviation-peak and scaling-collapse checks (validation mode)

Every check is recorded as a ValidationCheck; a check whose computation
raises is recorded as failed rather than aborting the suite.
"""

import math
import logging
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Tuple

import pandas as pd

from combined_factors import (
    MODES,
    correction_bundle,
    eta_E_lifshitz,
    eta_E_profile,
    eta_F_matsubara,
    eta_F_poisson,
    remainder_from_ratios,
)
from config import METAL_PRESETS
from constants import CODATA_2018, CavityState, PhysicalConstants, ideal_energy, ideal_force, thermal_wavelength
from exceptions import CasimirError, DomainError
from figures import build_figure_datasets, overlay_gap_at_peak, peak_deviation, scaling_spread
from quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_energy_factor
from thermal_factors import ThermalArgument, eta_E_T, eta_F_T, eta_F_T_integral
from utils import distance_grid
from vacuum_factors import eta_E_P, eta_F_P, short_distance_coefficient

# Setup logging
logger = logging.getLogger(__name__)

VALIDATION_COLUMNS = ['name', 'expected', 'actual', 'tolerance', 'passed']

REFERENCE_TEMPERATURE = 300.0

# Reference table values at 300 K, keyed by (metal, L)
TABLE_VALUES: Dict[Tuple[str, float], Dict[str, float]] = {
    ('Al', 0.5e-6): {'eta_F_P': 0.843, 'eta_F': 0.843, 'eta_E_P': 0.879, 'eta_E': 0.883},
    ('Cu', 0.5e-6): {'eta_F_P': 0.808, 'eta_F': 0.808, 'eta_E_P': 0.851, 'eta_E': 0.855},
    ('Al', 3e-6): {
        'eta_F_P': 0.971, 'eta_F_product': 1.084, 'eta_F': 1.090,
        'eta_E_P': 0.978, 'eta_E_product': 1.437, 'eta_E': 1.449,
    },
    ('Cu', 3e-6): {
        'eta_F_P': 0.963, 'eta_F_product': 1.076, 'eta_F': 1.083,
        'eta_E_P': 0.972, 'eta_E_product': 1.429, 'eta_E': 1.444,
    },
}

THERMAL_TABLE_VALUES = {
    0.5e-6: {'eta_F_T': 1.000, 'eta_E_T': 1.004},
    3e-6: {'eta_F_T': 1.117, 'eta_E_T': 1.470},
}

FORCE_TABLE_TOLERANCE = 0.002
ENERGY_TABLE_TOLERANCE = 0.003

DUAL_PATH_DISTANCES = (0.5e-6, 1e-6, 3e-6, 7e-6)
DUAL_PATH_WAVELENGTHS = (107e-9, 136e-9)

SCALING_WAVELENGTHS = (107e-9, 136e-9, 300e-9)
DEVIATION_WAVELENGTHS = (107e-9, 136e-9, 300e-9, 500e-9)


@dataclass(frozen=True)
class ValidationCheck:
    """One line of the validation report."""

    name: str
    expected: float
    actual: float
    tolerance: float
    passed: bool


def _check(name: str, expected: float, compute: Callable[[], float], tolerance: float) -> ValidationCheck:
    """Run one check; passed when |actual - expected| <= tolerance."""
    try:
        actual = float(compute())
    except CasimirError as e:
        logger.error(f"Validation check '{name}' could not be computed: {e}", exc_info=True)
        return ValidationCheck(name, expected, math.nan, tolerance, False)
    passed = math.isfinite(actual) and abs(actual - expected) <= tolerance
    level = logging.DEBUG if passed else logging.WARNING
    logger.log(level, f"{name}: expected {expected:.10g}, actual {actual:.10g}, tolerance {tolerance:.3g}")
    return ValidationCheck(name, expected, actual, tolerance, passed)


def _reference_checks(constants: PhysicalConstants) -> List[ValidationCheck]:
    force = 1.3001258e-7
    energy = 4.33375e-14
    return [
        _check('lambda_T(300 K) [m]', 7.63295e-6,
               lambda: thermal_wavelength(REFERENCE_TEMPERATURE, constants), 1e-10),
        _check('ideal force (L=1um, A=1cm2) [N]', force,
               lambda: ideal_force(1e-6, 1e-4, constants), 1e-6 * force),
        _check('ideal energy (L=1um, A=1cm2) [J]', energy,
               lambda: ideal_energy(1e-6, 1e-4, constants), 1e-5 * energy),
    ]


def _table_checks(spec: QuadratureSpec, mode: str, constants: PhysicalConstants) -> List[ValidationCheck]:
    checks = []
    lambda_T = thermal_wavelength(REFERENCE_TEMPERATURE, constants)
    for L, values in THERMAL_TABLE_VALUES.items():
        a = ThermalArgument.from_lengths(L, lambda_T)
        label = f"L={L * 1e6:g}um"
        checks.append(_check(f"eta_F_T ({label})", values['eta_F_T'], lambda a=a: eta_F_T(a, spec),
                             FORCE_TABLE_TOLERANCE))
        checks.append(_check(f"eta_E_T ({label})", values['eta_E_T'], lambda a=a: eta_E_T(a, spec),
                             ENERGY_TABLE_TOLERANCE))

    for (metal, L), values in TABLE_VALUES.items():
        label = f"{metal}, L={L * 1e6:g}um"
        cav = CavityState.from_si(L, REFERENCE_TEMPERATURE, METAL_PRESETS[metal], constants=constants)
        try:
            bundle = correction_bundle(cav, spec, mode)
        except CasimirError as e:
            logger.error(f"Correction bundle for {label} failed: {e}", exc_info=True)
            bundle = None
        derived = {}
        if bundle is not None:
            derived = {
                'eta_F_P': bundle.eta_F_P,
                'eta_F': bundle.eta_F,
                'eta_F_product': bundle.eta_F_P * bundle.eta_F_T,
                'eta_E_P': bundle.eta_E_P,
                'eta_E': bundle.eta_E,
                'eta_E_product': bundle.eta_E_P * bundle.eta_E_T,
            }
        for key, expected in values.items():
            tolerance = FORCE_TABLE_TOLERANCE if key.startswith('eta_F') else ENERGY_TABLE_TOLERANCE
            checks.append(ValidationCheck(
                f"{key} ({label})", expected, derived.get(key, math.nan), tolerance,
                key in derived and abs(derived[key] - expected) <= tolerance,
            ))
    return checks


def _coefficient_checks(spec: QuadratureSpec) -> List[ValidationCheck]:
    try:
        coefficient = short_distance_coefficient(spec)
    except CasimirError as e:
        logger.error(f"Short-distance coefficient failed: {e}", exc_info=True)
        coefficient = math.nan
    checks = [_check('short-distance coefficient', 1.193, lambda: coefficient, 0.001)]
    lp = 100.0
    reference = coefficient if math.isfinite(coefficient) else 1.193
    checks.append(_check(f"eta_F_P * lp at lp={lp:g}", reference, lambda: eta_F_P(lp, spec) * lp,
                         0.02 * reference))
    return checks


def _thermal_cross_checks(spec: QuadratureSpec) -> List[ValidationCheck]:
    checks = []
    for alpha in (1.0, 4.0, 10.0):
        a = ThermalArgument(alpha)
        try:
            series = eta_F_T(a, spec)
        except CasimirError as e:
            logger.error(f"eta_F_T(alpha={alpha}) failed: {e}", exc_info=True)
            series = math.nan
        checks.append(_check(f"eta_F_T series vs integral (alpha={alpha:g})", series,
                             lambda a=a: eta_F_T_integral(a, spec), 1e-8))
    return checks


def _thermal_energy_checks(spec: QuadratureSpec) -> List[ValidationCheck]:
    checks = []
    for alpha in (2.0, 4.0):
        try:
            series = eta_E_T(ThermalArgument(alpha), spec)
        except CasimirError as e:
            logger.error(f"eta_E_T(alpha={alpha}) failed: {e}", exc_info=True)
            series = math.nan

        def integral(alpha=alpha):
            return integrate_energy_factor(lambda tau: eta_F_T(ThermalArgument(alpha * tau), spec), spec).require(
                f"eta_E_T distance integral (alpha={alpha})")

        checks.append(_check(f"eta_E_T series vs distance integral of eta_F_T (alpha={alpha:g})", series, integral,
                             1e-7 * abs(series) if math.isfinite(series) else 0.0))
    return checks


def _audit_checks(spec: QuadratureSpec, constants: PhysicalConstants) -> List[ValidationCheck]:
    cav = CavityState.from_si(1e-6, REFERENCE_TEMPERATURE, METAL_PRESETS['Al'], constants=constants)
    lifshitz = eta_E_lifshitz(cav.lp, cav.lt, spec).require('eta_E (Lifshitz)')
    return [_check('energy truncation audit and Lifshitz agreement (Al, L=1um)', lifshitz,
                   lambda: eta_E_profile(cav.lp, cav.lt, spec, audit=True).require('eta_E (audited)'),
                   1e-6 * abs(lifshitz))]


def _identity_checks(spec: QuadratureSpec, constants: PhysicalConstants) -> List[ValidationCheck]:
    checks = []
    for lambda_P in DUAL_PATH_WAVELENGTHS:
        for L in DUAL_PATH_DISTANCES:
            cav = CavityState.from_si(L, REFERENCE_TEMPERATURE, lambda_P, constants=constants)
            label = f"L={L * 1e6:g}um, lambda_P={lambda_P * 1e9:g}nm"
            matsubara = eta_F_matsubara(cav.lp, cav.lt, spec).require('eta_F (Matsubara)')
            checks.append(_check(f"Matsubara vs Poisson ({label})", matsubara,
                                 lambda cav=cav: eta_F_poisson(cav.lp, cav.lt, spec).require('eta_F (Poisson)'),
                                 1e-6 * abs(matsubara)))
            if lambda_P == DUAL_PATH_WAVELENGTHS[0]:
                def decomposition(cav=cav):
                    a = ThermalArgument.from_cavity(cav)
                    remainder = remainder_from_ratios(cav.lp, cav.lt, spec).require('remainder')
                    return eta_F_P(cav.lp, spec) + (eta_F_T(a, spec) - 1.0) + remainder

                checks.append(_check(f"decomposition identity ({label})", matsubara, decomposition, 1e-7))
    return checks


def _limit_checks(spec: QuadratureSpec) -> List[ValidationCheck]:
    lt = thermal_wavelength(REFERENCE_TEMPERATURE) / 1e-6
    tiny_lp = 1e-7
    cold_lt = 200.0
    lp = 0.1
    a = ThermalArgument.from_ratio(lt)
    cold = ThermalArgument.from_ratio(cold_lt)
    return [
        _check('lambda_P -> 0: eta_F -> eta_F_T', eta_F_T(a, spec),
               lambda: eta_F_matsubara(tiny_lp, lt, spec).require(), 1e-6),
        _check('lambda_P -> 0: eta_E -> eta_E_T', eta_E_T(a, spec),
               lambda: eta_E_lifshitz(tiny_lp, lt, spec).require(), 1e-6),
        _check('T -> 0: eta_F -> eta_F_P', eta_F_P(lp, spec),
               lambda: eta_F_matsubara(lp, cold_lt, spec).require(), 1e-6),
        _check('T -> 0: eta_E -> eta_E_P * eta_E_T', eta_E_P(lp, spec) * eta_E_T(cold, spec),
               lambda: eta_E_lifshitz(lp, cold_lt, spec).require(), 1e-6),
        _check('perfect mirrors at T = 0: eta_F = 1', 1.0,
               lambda: eta_F_matsubara(0.0, math.inf, spec).require(), 0.0),
        _check('perfect mirrors at T = 0: eta_E = 1', 1.0,
               lambda: eta_E_lifshitz(0.0, math.inf, spec).require(), 0.0),
    ]


def _scale_checks(spec: QuadratureSpec, constants: PhysicalConstants) -> List[ValidationCheck]:
    base = CavityState.from_si(1e-6, REFERENCE_TEMPERATURE, 107e-9, constants=constants)
    scaled = CavityState.from_si(2e-6, REFERENCE_TEMPERATURE / 2.0, 214e-9, constants=constants)
    expected = eta_F_matsubara(base.lp, base.lt, spec).require()
    return [_check('scale invariance of eta_F in (lp, lt)', expected,
                   lambda: eta_F_matsubara(scaled.lp, scaled.lt, spec).require(), 1e-9 * abs(expected))]


def _figure_checks(spec: QuadratureSpec, constants: PhysicalConstants, workers: int) -> List[ValidationCheck]:
    grid = distance_grid(0.5e-6, 10e-6, 14, 'log')
    try:
        datasets = build_figure_datasets(grid, REFERENCE_TEMPERATURE, DEVIATION_WAVELENGTHS, spec, 'fast',
                                         workers, constants=constants)
    except CasimirError as e:
        logger.error(f"Figure datasets for validation failed: {e}", exc_info=True)
        datasets = None

    def metric(fn):
        if datasets is None:
            raise DomainError('figure datasets unavailable')
        return fn()

    fig3 = datasets['fig3'] if datasets else None
    fig4 = datasets['fig4'] if datasets else None
    checks = [
        _check('peak delta_F (Al)', 0.01, lambda: metric(lambda: peak_deviation(fig3, 107e-9, 'delta_F')), 0.005),
        _check('peak delta_F (lambda_P=500nm)', 0.04,
               lambda: metric(lambda: peak_deviation(fig3, 500e-9, 'delta_F')), 0.01),
    ]
    reference = SCALING_WAVELENGTHS[0]
    for other in SCALING_WAVELENGTHS[1:]:
        checks.append(_check(
            f"scaling collapse Delta_F ({reference * 1e9:g}nm vs {other * 1e9:g}nm)", 0.0,
            lambda other=other: metric(lambda: scaling_spread(fig4, reference, other, 1e-6, 10e-6)), 0.05,
        ))
    for lambda_P in SCALING_WAVELENGTHS:
        for column in ('Delta_F', 'Delta_E'):
            checks.append(_check(
                f"analytic {column} overlay at peak ({lambda_P * 1e9:g}nm)", 0.0,
                lambda lambda_P=lambda_P, column=column: metric(lambda: overlay_gap_at_peak(fig4, lambda_P, column)),
                0.03,
            ))
    return checks


def run_validation(
    mode: str = 'fast',
    spec: QuadratureSpec = DEFAULT_SPEC,
    constants: PhysicalConstants = CODATA_2018,
    workers: int = 1,
) -> List[ValidationCheck]:
    """Run the validation suite.

    Args:
        mode: 'fast' for reference, table and thermal cross-checks (force and energy); 'validation'
            adds the truncation audit, path identities, limits, scale
            invariance, deviation peaks and scaling collapse
        spec: Quadrature tolerances
        constants: Physical constants (replaceable to exercise the reference checks)
        workers: Worker processes for the figure sweep

    Returns:
        List[ValidationCheck]: One entry per check, in a fixed order
    """
    if mode not in MODES:
        raise DomainError(f"Unknown mode {mode!r}; expected one of {MODES}")
    logger.info(f"Running {mode} validation suite")

    checks = _reference_checks(constants)
    checks += _table_checks(spec, mode, constants)
    checks += _coefficient_checks(spec)
    checks += _thermal_cross_checks(spec)
    checks += _thermal_energy_checks(spec)
    if mode == 'validation':
        groups = [
            lambda: _audit_checks(spec, constants),
            lambda: _identity_checks(spec, constants),
            lambda: _limit_checks(spec),
            lambda: _scale_checks(spec, constants),
            lambda: _figure_checks(spec, constants, workers),
        ]
        for group in groups:
            try:
                checks += group()
            except CasimirError as e:
                logger.error(f"Validation group failed: {e}", exc_info=True)
                checks.append(ValidationCheck('validation group', math.nan, math.nan, math.nan, False))

    failed = sum(not check.passed for check in checks)
    logger.info(f"Validation finished: {len(checks) - failed} of {len(checks)} checks passed")
    return checks


def checks_frame(checks: List[ValidationCheck]) -> pd.DataFrame:
    """Tabulate checks for printing or saving"""
    return pd.DataFrame([asdict(check) for check in checks], columns=VALIDATION_COLUMNS)

import math

import mpmath as mp
import numpy as np
import pytest

from constants import CavityState, thermal_wavelength
from exceptions import DomainError
from quadrature import integrate_energy_factor
from thermal_factors import (
    Delta_E_analytic,
    Delta_F_analytic,
    ThermalArgument,
    edge_summand,
    energy_summand,
    eta_E_T,
    eta_F_T,
    eta_F_T_integral,
    force_summand,
    phi_E,
    phi_E_summand,
    phi_F,
    phi_F_summand,
)

LAMBDA_T_300K = thermal_wavelength(300.0)

mp.mp.dps = 40


def mp_force(x):
    x = mp.mpf(x)
    return 1 / x ** 4 - mp.cosh(x) / (x * mp.sinh(x) ** 3)


def mp_energy(x):
    x = mp.mpf(x)
    return -2 / x ** 4 + mp.coth(x) / x ** 3 + 1 / (x ** 2 * mp.sinh(x) ** 2)


def mp_edge(x):
    x = mp.mpf(x)
    return 6 / x ** 4 - (2 + 4 * mp.cosh(x) ** 2) / mp.sinh(x) ** 4


@pytest.mark.parametrize("x", [0.01, 0.0999, 0.1, 0.35, 1.0, 3.0, 12.0])
@pytest.mark.parametrize("summand, oracle", [
    (force_summand, mp_force),
    (energy_summand, mp_energy),
    (edge_summand, mp_edge),
])
def test_summands_match_hyperbolic_forms(summand, oracle, x):
    assert float(summand(x)) == pytest.approx(float(oracle(x)), rel=1e-8, abs=1e-13)


def test_summand_reference_values():
    assert float(force_summand(1.0)) == pytest.approx(0.0492815, abs=1e-6)
    assert float(energy_summand(1.0)) == pytest.approx(0.0370969, abs=1e-6)
    assert float(edge_summand(1.0)) == pytest.approx(-0.0418376, abs=1e-6)


def test_summands_do_not_overflow():
    x = np.array([400.0, 1e4])
    for summand in (force_summand, energy_summand, edge_summand):
        assert np.all(np.isfinite(summand(x)))


def test_interplay_summands_are_combinations():
    x = np.linspace(0.05, 6.0, 9)
    np.testing.assert_allclose(phi_F_summand(x), energy_summand(x) - 4 * force_summand(x) + edge_summand(x))
    np.testing.assert_allclose(phi_E_summand(x), energy_summand(x) - 2 * force_summand(x))


class TestThermalArgument:
    def test_from_lengths(self):
        a = ThermalArgument.from_lengths(3e-6, LAMBDA_T_300K)
        assert a.alpha == pytest.approx(math.pi * LAMBDA_T_300K / 6e-6)
        assert a.lt == pytest.approx(LAMBDA_T_300K / 3e-6)

    def test_from_cavity(self):
        a = ThermalArgument.from_cavity(CavityState.from_si(3e-6, 300.0, 107e-9))
        assert a.alpha == pytest.approx(math.pi * LAMBDA_T_300K / 6e-6, rel=1e-12)
        assert ThermalArgument.from_cavity(CavityState.from_si(3e-6, 0.0, 107e-9)).is_cold

    def test_non_positive_rejected(self):
        with pytest.raises(DomainError):
            ThermalArgument(0.0)
        with pytest.raises(DomainError):
            ThermalArgument.from_lengths(-1.0, LAMBDA_T_300K)

    def test_cold_limit(self):
        cold = ThermalArgument(math.inf)
        assert cold.is_cold
        assert eta_F_T(cold) == 1.0
        assert eta_E_T(cold) == 1.0
        assert phi_F(cold) == 0.0
        assert phi_E(cold) == 0.0


class TestTableValues:
    def test_half_micron(self):
        a = ThermalArgument.from_lengths(0.5e-6, LAMBDA_T_300K)
        assert eta_F_T(a) == pytest.approx(1.000, abs=0.002)
        assert eta_E_T(a) == pytest.approx(1.004, abs=0.002)

    def test_three_microns(self):
        a = ThermalArgument.from_lengths(3e-6, LAMBDA_T_300K)
        assert eta_F_T(a) == pytest.approx(1.117, abs=0.002)
        assert eta_E_T(a) == pytest.approx(1.470, abs=0.003)


def test_factors_grow_with_temperature():
    values = [eta_F_T(ThermalArgument(alpha)) for alpha in (20.0, 5.0, 2.0, 1.0, 0.5)]
    assert values == sorted(values)


def test_high_temperature_force_is_linear_in_distance():
    # classical limit: eta_F^T -> 60 zeta(3)/(pi^3 lt)
    lt = 0.05
    expected = 60.0 * float(mp.zeta(3)) / (math.pi ** 3 * lt)
    assert eta_F_T(ThermalArgument.from_ratio(lt)) == pytest.approx(expected, rel=1e-3)


@pytest.mark.parametrize("phi, prefactor, powers", [
    (phi_F, 15, {3: 1}),
    (phi_E, 45, {3: 1, 4: -4}),
])
def test_interplay_functions_match_high_precision_sums(phi, prefactor, powers):
    alpha = 4.0

    def summand(x):
        if phi is phi_F:
            return mp_energy(x) - 4 * mp_force(x) + mp_edge(x)
        return mp_energy(x) - 2 * mp_force(x)

    with mp.workdps(50):
        a = mp.mpf(alpha)
        # the power-law part sums to zeta values; the rest decays like e^(-2 alpha m)
        power_part = sum(c * mp.zeta(p) / a ** p for p, c in powers.items())
        rest = mp.nsum(lambda m: summand(a * m) - sum(c / (a * m) ** p for p, c in powers.items()), [1, mp.inf])
        expected = prefactor / mp.pi * (power_part + rest)
    assert phi(ThermalArgument(alpha)) == pytest.approx(float(expected), rel=1e-10)


class TestDeviationFunctions:
    def test_zero_temperature(self):
        assert Delta_F_analytic(1e-6, math.inf) == 0.0
        assert Delta_E_analytic(1e-6, math.inf) == 0.0

    def test_finite_and_positive_at_three_microns(self):
        assert 0 < Delta_F_analytic(3e-6, LAMBDA_T_300K) < 10
        assert 0 < Delta_E_analytic(3e-6, LAMBDA_T_300K) < 10

    def test_assembled_from_factors(self):
        L = 2e-6
        a = ThermalArgument.from_lengths(L, LAMBDA_T_300K)
        lt = LAMBDA_T_300K / L
        eta = eta_F_T(a)
        expected = 8 / (3 * math.pi) * lt * (eta - 1) / eta + lt * phi_F(a) / eta
        assert Delta_F_analytic(L, LAMBDA_T_300K) == pytest.approx(expected, rel=1e-12)

    def test_invalid_distance(self):
        with pytest.raises(DomainError):
            Delta_F_analytic(0.0, LAMBDA_T_300K)


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [1.0, 4.0, 10.0])
def test_series_matches_wavevector_integral(alpha):
    a = ThermalArgument(alpha)
    assert eta_F_T_integral(a) == pytest.approx(eta_F_T(a), abs=1e-8)


@pytest.mark.slow
def test_energy_factor_is_distance_integral_of_force_factor():
    alpha = 2.0
    report = integrate_energy_factor(lambda tau: eta_F_T(ThermalArgument(alpha * tau)))
    assert report.value == pytest.approx(eta_E_T(ThermalArgument(alpha)), rel=1e-7)

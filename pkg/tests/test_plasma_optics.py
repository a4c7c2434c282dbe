import math

import mpmath as mp
import numpy as np
import pytest

from constants import CODATA_2018, PlasmaMirror
from exceptions import DomainError
from plasma_optics import (
    SERIES_THRESHOLD,
    SpectralPoint,
    epsilon_plasma,
    log_mode_sum,
    mode_sum,
    mode_sum_deficit,
    one_minus_parallel_squared,
    one_minus_rho_of_ratio,
    parallel_reflection,
    polarization_terms,
    reflection_pair,
    rho,
    rho_of_ratio,
)

mp.mp.dps = 50


def raw_reflections(s, y):
    """Fresnel amplitudes from the plasma permittivity, in units where omega_P/c = 1."""
    s = mp.mpf(s)
    y = mp.mpf(y)
    kappa_m = mp.sqrt(s ** 2 + 1)
    r_perp = (s - kappa_m) / (s + kappa_m)
    eps_kappa = s + 1 / (y ** 2 * s)
    r_par = (kappa_m - eps_kappa) / (kappa_m + eps_kappa)
    return r_perp, r_par


def test_rho_reference_value():
    assert rho_of_ratio(10.0) == pytest.approx(1.0 / (math.sqrt(101.0) + 10.0) ** 2, rel=1e-14)
    assert rho_of_ratio(10.0) == pytest.approx(0.00248758, abs=1e-8)


def test_rho_is_one_for_perfect_mirror():
    assert rho(1e7, PlasmaMirror(0.0)) == 1.0


def test_rho_decreases_with_wavevector():
    values = rho_of_ratio(np.geomspace(1e-6, 1e6, 50))
    assert np.all(np.diff(values) < 0)
    assert np.all((values > 0) & (values <= 1))


def test_one_minus_rho_without_cancellation():
    s = 1e-12
    assert one_minus_rho_of_ratio(s) == pytest.approx(2.0 * s * (1.0 - s), rel=1e-12)


def test_perfect_mirror_ratio_is_warning_free():
    s = np.array([0.0, 1e-3, 1e6])
    with np.errstate(all="raise"):
        gap = one_minus_rho_of_ratio(s)
        reflection = rho_of_ratio(s)
    assert gap[0] == 0.0 and reflection[0] == 1.0


def test_series_branch_is_continuous():
    below = rho_of_ratio(SERIES_THRESHOLD * (1.0 - 1e-9))
    above = rho_of_ratio(SERIES_THRESHOLD * (1.0 + 1e-9))
    assert above == pytest.approx(below, rel=1e-8)


@pytest.mark.parametrize("s", [1e-3, 0.05, 0.3, 1.0, 3.0])
@pytest.mark.parametrize("y", [0.1, 0.5, 1.0])
def test_reduced_amplitudes_match_fresnel_form(s, y):
    r_perp, r_par = raw_reflections(s, y)
    rho_value = rho_of_ratio(s)
    assert -rho_value == pytest.approx(float(r_perp), rel=1e-12)
    assert float(parallel_reflection(rho_value, y)) == pytest.approx(float(r_par), rel=1e-12)


def test_one_minus_parallel_squared_near_perfect_reflection():
    s, y = 1e-10, 0.5
    _, r_par = raw_reflections(s, y)
    expected = float(1 - r_par ** 2)
    actual = float(one_minus_parallel_squared(rho_of_ratio(s), y, one_minus_rho_of_ratio(s)))
    assert actual == pytest.approx(expected, rel=1e-9)


def test_parallel_amplitude_at_zero_frequency():
    assert float(parallel_reflection(0.3, 0.0)) == -1.0


def test_reflection_pair_at_zero_frequency():
    mirror = PlasmaMirror(107e-9)
    pair = reflection_pair(SpectralPoint(0.0, 1e6), mirror)
    assert pair.r_par == -1.0
    assert pair.r_perp == pytest.approx(-rho(1e6, mirror))


def test_reflection_pair_matches_reduced_form():
    mirror = PlasmaMirror(136e-9)
    p = SpectralPoint.from_reduced(kappa=2e7, y=0.4)
    pair = reflection_pair(p, mirror)
    s = 2e7 * 136e-9 / (2 * math.pi)
    _, r_par = raw_reflections(s, 0.4)
    assert pair.r_par == pytest.approx(float(r_par), rel=1e-11)


def test_spectral_point_requires_kappa_above_light_line():
    with pytest.raises(DomainError):
        SpectralPoint(omega=CODATA_2018.c * 2.0, kappa=1.0)


def test_epsilon_plasma():
    mirror = PlasmaMirror(107e-9)
    omega = mirror.omega_P / 3.0
    assert epsilon_plasma(omega, mirror) == pytest.approx(10.0)
    assert math.isinf(epsilon_plasma(omega, PlasmaMirror(0.0)))
    with pytest.raises(DomainError):
        epsilon_plasma(0.0, mirror)


class TestKernels:
    u = np.linspace(0.05, 8.0, 17)

    def test_perfect_mirror_mode_sum(self):
        expected = 2.0 * np.exp(-2 * self.u) / -np.expm1(-2 * self.u)
        np.testing.assert_allclose(mode_sum(self.u, 0.3, 0.0), expected, rtol=1e-14)

    def test_deficit_is_difference_to_perfect_mirror(self):
        lp = 0.4
        expected = mode_sum(self.u, 0.6, lp) - mode_sum(self.u, 0.6, 0.0)
        np.testing.assert_allclose(mode_sum_deficit(self.u, 0.6, lp), expected, rtol=1e-10)

    def test_polarization_deficits_on_a_grid(self):
        lp = 0.4
        y = np.linspace(0.0, 1.0, 5)
        te, tm = polarization_terms(self.u[:, None], y[None, :], lp, deficit=True)
        full_te, full_tm = polarization_terms(self.u[:, None], y[None, :], lp)
        perfect_te, perfect_tm = polarization_terms(self.u[:, None], y[None, :], 0.0)
        # TE does not depend on y
        assert te.shape == (len(self.u), 1)
        np.testing.assert_allclose(te[:, 0], full_te[:, 0] - perfect_te[:, 0], rtol=1e-10)
        np.testing.assert_allclose(tm, full_tm - perfect_tm, rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose((te + tm)[:, 2], mode_sum_deficit(self.u, 0.5, lp), rtol=1e-13)

    def test_log_mode_sum_matches_direct_form(self):
        lp, y = 0.3, 0.7
        rho_value = rho_of_ratio(self.u * lp / (2 * math.pi))
        x2 = np.exp(-2 * self.u)
        r_par = parallel_reflection(rho_value, y)
        expected = -np.log1p(-rho_value ** 2 * x2) - np.log1p(-r_par ** 2 * x2)
        np.testing.assert_allclose(log_mode_sum(self.u, y, lp), expected, rtol=1e-12)

    def test_mode_sum_positive_and_below_perfect(self):
        values = mode_sum(self.u, 0.5, 0.2)
        assert np.all(values > 0)
        assert np.all(values < mode_sum(self.u, 0.5, 0.0))

import math

import pytest

import combined_factors
from combined_factors import (
    CorrectionBundle,
    SweepResult,
    correction_bundle,
    energy,
    energy_lifshitz,
    eta_E_lifshitz,
    eta_E_profile,
    eta_F_matsubara,
    eta_F_poisson,
    factorized_estimate,
    force_matsubara,
    force_poisson,
    remainder_delta_eta_F,
    remainder_from_ratios,
    sweep,
)
from config import METAL_PRESETS
from constants import CavityState, thermal_wavelength
from exceptions import ConvergenceError, DomainError
from quadrature import ConvergenceReport
from thermal_factors import Delta_F_analytic, ThermalArgument, eta_E_T, eta_F_T, phi_F
from vacuum_factors import eta_E_P, eta_F_P

LT_1UM = thermal_wavelength(300.0) / 1e-6


class TestLimitRouting:
    def test_perfect_mirror_gives_thermal_factor(self):
        a = ThermalArgument.from_ratio(LT_1UM)
        assert eta_F_matsubara(0.0, LT_1UM).value == eta_F_T(a)
        assert eta_E_lifshitz(0.0, LT_1UM).value == eta_E_T(a)

    def test_zero_temperature_gives_vacuum_factor(self):
        assert eta_F_matsubara(0.2, math.inf).value == eta_F_P(0.2)
        assert eta_F_poisson(0.2, math.inf).value == eta_F_P(0.2)

    def test_both_limits_give_one(self):
        assert eta_F_matsubara(0.0, math.inf).value == 1.0
        assert eta_E_lifshitz(0.0, math.inf).value == 1.0
        assert eta_E_profile(0.0, math.inf).value == 1.0

    def test_remainder_vanishes_in_limits(self):
        assert remainder_from_ratios(0.0, LT_1UM).value == 0.0
        assert remainder_from_ratios(0.2, math.inf).value == 0.0

    @pytest.mark.parametrize("lp, lt", [(-0.1, 5.0), (math.nan, 5.0), (0.1, 0.0), (0.1, -2.0)])
    def test_invalid_ratios(self, lp, lt):
        with pytest.raises(DomainError):
            eta_F_matsubara(lp, lt)


def test_small_plasma_wavelength_approaches_thermal_factor():
    assert eta_F_matsubara(1e-7, LT_1UM).value == pytest.approx(eta_F_T(ThermalArgument.from_ratio(LT_1UM)), abs=1e-6)


def test_low_temperature_approaches_vacuum_factor():
    assert eta_F_matsubara(0.1, 200.0).value == pytest.approx(eta_F_P(0.1), abs=1e-6)


class TestLowTemperatureForm:
    def test_large_thermal_ratio_skips_matsubara_sum(self, monkeypatch):
        def summed(*args):
            raise AssertionError("Matsubara terms were summed")

        monkeypatch.setattr(combined_factors, "_matsubara_report", summed)
        force = eta_F_matsubara(0.1, 1e4)
        free_energy = eta_E_lifshitz(0.1, 1e4)
        assert force.converged and free_energy.converged
        assert force.value == pytest.approx(eta_F_P(0.1), abs=1e-9)
        assert free_energy.value == pytest.approx(eta_E_P(0.1), abs=1e-9)

    def test_inaccurate_form_falls_back_to_sum(self, monkeypatch):
        kinds = []

        def summed(lp, lt, spec, kind):
            kinds.append(kind)
            return ConvergenceReport(1.0, 0.0, 1, True)

        monkeypatch.setattr(combined_factors, "_matsubara_report", summed)
        # eta_E^T - 1 is about 1.4e-8 at lt = 1000, far above the tolerance
        assert eta_E_lifshitz(1.0, 1000.0).value == 1.0
        assert kinds == ["energy"]

    @pytest.mark.slow
    def test_agrees_with_matsubara_sum_at_threshold(self, spec):
        lt = combined_factors.LOW_TEMPERATURE_LT
        for kind, tolerance in (("force", 1e-9), ("energy", 1e-8)):
            low = combined_factors._low_temperature_report(0.1, lt, spec, kind)
            summed = combined_factors._matsubara_report(0.1, lt, spec, kind)
            assert low.value == pytest.approx(summed.value, abs=tolerance)


def test_scale_invariance():
    base = CavityState.from_si(1e-6, 300.0, 107e-9)
    scaled = CavityState.from_si(2e-6, 150.0, 214e-9)
    assert eta_F_matsubara(scaled.lp, scaled.lt).value == pytest.approx(
        eta_F_matsubara(base.lp, base.lt).value, rel=1e-9
    )


def test_force_is_factor_times_ideal_force(al_cavity):
    eta = eta_F_matsubara(al_cavity.lp, al_cavity.lt).value
    assert force_matsubara(al_cavity) == pytest.approx(eta * al_cavity.ideal_force, rel=1e-15)


def test_energy_lifshitz_is_factor_times_ideal_energy(al_cavity):
    eta = eta_E_lifshitz(al_cavity.lp, al_cavity.lt).value
    assert energy_lifshitz(al_cavity) == pytest.approx(eta * al_cavity.ideal_energy, rel=1e-15)


class TestFactorizedEstimate:
    def test_product(self):
        assert factorized_estimate(0.9, 1.1, 0.02, 0.5) == pytest.approx(0.9 * 1.1 * 1.01)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            factorized_estimate(0.9, math.nan, 0.02, 0.5)


class TestCorrectionBundle:
    def test_perfect_cold_cavity(self):
        bundle = correction_bundle(CavityState.from_si(1e-6, 0.0, 0.0))
        for name in ("eta_F", "eta_F_P", "eta_F_T", "eta_E", "eta_E_P", "eta_E_T"):
            assert getattr(bundle, name) == 1.0
        assert bundle.delta_F == 0.0
        assert bundle.Delta_F_rescaled == 0.0
        assert bundle.force == pytest.approx(CavityState.from_si(1e-6, 0.0, 0.0).ideal_force)

    def test_perfect_mirror_at_room_temperature(self):
        cav = CavityState.from_si(2e-6, 300.0, 0.0)
        bundle = correction_bundle(cav)
        assert bundle.eta_F == pytest.approx(bundle.eta_F_T, rel=1e-12)
        assert bundle.delta_F == pytest.approx(0.0, abs=1e-12)
        assert bundle.Delta_F_rescaled == pytest.approx(Delta_F_analytic(2e-6, cav.env.lambda_T), rel=1e-12)

    def test_al_at_half_micron(self):
        bundle = correction_bundle(CavityState.from_si(0.5e-6, 300.0, METAL_PRESETS["Al"]))
        assert bundle.eta_F_P == pytest.approx(0.843, abs=0.002)
        assert bundle.eta_F == pytest.approx(0.843, abs=0.002)
        assert bundle.eta_E_P == pytest.approx(0.879, abs=0.002)
        assert bundle.eta_E == pytest.approx(0.883, abs=0.002)
        assert bundle.eta_F_T == pytest.approx(1.000, abs=0.002)
        assert bundle.eta_E_T == pytest.approx(1.004, abs=0.002)

    def test_al_at_three_microns(self):
        bundle = correction_bundle(CavityState.from_si(3e-6, 300.0, METAL_PRESETS["Al"]))
        assert bundle.eta_F_P == pytest.approx(0.971, abs=0.002)
        assert bundle.eta_F_P * bundle.eta_F_T == pytest.approx(1.084, abs=0.002)
        assert bundle.eta_F == pytest.approx(1.090, abs=0.002)
        assert bundle.eta_E_P * bundle.eta_E_T == pytest.approx(1.437, abs=0.003)
        assert bundle.eta_E == pytest.approx(1.449, abs=0.003)
        assert bundle.delta_F > 0

    def test_deviation_definitions(self, cu_cavity):
        bundle = correction_bundle(cu_cavity)
        assert bundle.delta_F == pytest.approx(bundle.eta_F / (bundle.eta_F_P * bundle.eta_F_T) - 1.0, rel=1e-14)
        assert bundle.Delta_E_rescaled == pytest.approx(cu_cavity.lt / cu_cavity.lp * bundle.delta_E, rel=1e-14)

    def test_warning_when_plasma_wavelength_is_large(self):
        bundle = correction_bundle(CavityState.from_si(5e-6, 300.0, 2e-6))
        assert any("exceeds" in note for note in bundle.warnings)

    def test_record_renames_rescaled_fields(self, al_cavity):
        record = correction_bundle(al_cavity).to_record()
        assert "Delta_F" in record and "Delta_F_rescaled" not in record
        assert isinstance(record["warnings"], str)

    def test_unknown_mode(self, al_cavity):
        with pytest.raises(DomainError):
            correction_bundle(al_cavity, mode="quick")


class TestSweep:
    def test_empty_sweep_rejected(self):
        with pytest.raises(DomainError):
            sweep([])

    def test_results_in_input_order(self):
        cavities = [CavityState.from_si(L, 0.0, 0.0) for L in (3e-6, 1e-6, 2e-6)]
        results = sweep(cavities)
        assert [r.cavity.L for r in results] == [3e-6, 1e-6, 2e-6]
        assert all(r.ok for r in results)

    def test_failed_point_is_reported(self, monkeypatch):
        def failing(cav, spec, mode):
            raise ConvergenceError(ConvergenceReport(1.0, 1.0, 10, False), "test point")

        monkeypatch.setattr(combined_factors, "correction_bundle", failing)
        results = sweep([CavityState.from_si(1e-6, 300.0, 107e-9)])
        assert not results[0].ok
        assert "test point" in results[0].error

    def test_sweep_result_ok_flag(self, al_cavity):
        assert not SweepResult(al_cavity, None, "boom").ok

    @pytest.mark.slow
    def test_process_pool_matches_serial(self):
        cavities = [CavityState.from_si(L, 300.0, METAL_PRESETS["Al"]) for L in (1e-6, 2e-6, 4e-6)]
        serial = sweep(cavities)
        parallel = sweep(cavities, max_workers=2)
        assert [r.bundle.eta_F for r in parallel] == [r.bundle.eta_F for r in serial]


@pytest.mark.slow
class TestAcceptance:
    def test_cu_tables(self):
        half = correction_bundle(CavityState.from_si(0.5e-6, 300.0, METAL_PRESETS["Cu"]))
        assert half.eta_F_P == pytest.approx(0.808, abs=0.002)
        assert half.eta_F == pytest.approx(0.808, abs=0.002)
        assert half.eta_E_P == pytest.approx(0.851, abs=0.002)
        assert half.eta_E == pytest.approx(0.855, abs=0.002)
        three = correction_bundle(CavityState.from_si(3e-6, 300.0, METAL_PRESETS["Cu"]))
        assert three.eta_F_P == pytest.approx(0.963, abs=0.002)
        assert three.eta_F_P * three.eta_F_T == pytest.approx(1.076, abs=0.002)
        assert three.eta_F == pytest.approx(1.083, abs=0.002)
        assert three.eta_E_P == pytest.approx(0.972, abs=0.003)
        assert three.eta_E_P * three.eta_E_T == pytest.approx(1.429, abs=0.003)
        assert three.eta_E == pytest.approx(1.444, abs=0.003)

    @pytest.mark.parametrize("L", [0.5e-6, 1e-6, 3e-6, 7e-6])
    @pytest.mark.parametrize("lambda_P", [107e-9, 136e-9])
    def test_matsubara_and_poisson_forces_agree(self, L, lambda_P):
        cav = CavityState.from_si(L, 300.0, lambda_P)
        assert force_poisson(cav) == pytest.approx(force_matsubara(cav), rel=1e-6)

    @pytest.mark.parametrize("L", [0.5e-6, 1e-6, 3e-6, 7e-6])
    def test_decomposition_identity(self, L):
        cav = CavityState.from_si(L, 300.0, 107e-9)
        a = ThermalArgument.from_cavity(cav)
        assembled = eta_F_P(cav.lp) + (eta_F_T(a) - 1.0) + remainder_delta_eta_F(cav)
        assert assembled == pytest.approx(eta_F_matsubara(cav.lp, cav.lt).value, abs=1e-7)

    def test_energy_paths_agree(self, al_cavity):
        assert energy(al_cavity, audit=True) == pytest.approx(energy_lifshitz(al_cavity), rel=1e-6)

    def test_low_temperature_energy_factorizes(self):
        lp, lt = 0.1, 200.0
        expected = eta_E_P(lp) * eta_E_T(ThermalArgument.from_ratio(lt))
        assert eta_E_lifshitz(lp, lt).value == pytest.approx(expected, abs=1e-6)

    def test_validation_mode_bundle_has_no_path_disagreement(self, al_cavity):
        bundle = correction_bundle(al_cavity, mode="validation")
        assert not any("energy paths differ" in note for note in bundle.warnings)


def test_bundle_is_frozen():
    bundle = correction_bundle(CavityState.from_si(1e-6, 0.0, 0.0))
    assert isinstance(bundle, CorrectionBundle)
    with pytest.raises(AttributeError):
        bundle.eta_F = 2.0


@pytest.mark.slow
def test_remainder_is_first_order_in_plasma_wavelength():
    phi = phi_F(ThermalArgument.from_ratio(LT_1UM))
    errors = []
    for lp in (0.05, 0.02, 0.01):
        ratio = remainder_from_ratios(lp, LT_1UM).value / (lp * phi)
        assert ratio == pytest.approx(1.0, abs=lp)
        errors.append(abs(ratio - 1.0))
    assert errors == sorted(errors, reverse=True)


@pytest.mark.slow
def test_force_is_minus_energy_derivative(al_cavity):
    h = 1e-3 * al_cavity.L
    above = CavityState.from_si(al_cavity.L + h, 300.0, METAL_PRESETS["Al"])
    below = CavityState.from_si(al_cavity.L - h, 300.0, METAL_PRESETS["Al"])
    derivative = (energy_lifshitz(above) - energy_lifshitz(below)) / (2.0 * h)
    assert force_matsubara(al_cavity) == pytest.approx(-derivative, rel=1e-4)

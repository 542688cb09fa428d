"""Tests for far-field laws, the cone defect, integrated bounds and ordering in the speed."""

import numpy as np
import pytest

from gmcf_translate.core import FlowParams
from gmcf_translate.exceptions import NotApplicable
from gmcf_translate.profiles import (
    IntegratorOptions,
    asymptotic_value,
    cone_slope,
    integrate_zeta,
    monotonicity_probe,
    sandwich_bounds,
    v_shape_defect,
)


class TestFarField:
    def test_cone_slope(self, cone_params):
        assert cone_slope(cone_params, 5.0) == pytest.approx(4.0 / 3.0)

    def test_cone_slope_needs_speed_above_forcing(self, degenerate_params):
        with pytest.raises(NotApplicable):
            cone_slope(degenerate_params, 1.0)

    def test_zero_forcing_growth(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0)
        assert asymptotic_value(params, 1.0, 10.0) == pytest.approx(50.0)
        assert asymptotic_value(params, 1.0, 10.0, "psi") == pytest.approx(10.0)

    def test_corrected_cone_slope(self, cone_params):
        expected = 4.0 / 3.0 - 5.0 / (9.0 * 200.0)
        assert asymptotic_value(cone_params, 5.0, 200.0, "psi_corrected") == pytest.approx(expected)

    def test_correction_only_for_unit_exponent(self):
        with pytest.raises(NotApplicable, match="alpha = 1"):
            asymptotic_value(FlowParams(N=2, alpha=2.0, b=3.0), 5.0, 200.0, "psi_corrected")

    def test_unknown_quantity(self, cone_params):
        with pytest.raises(ValueError, match="quantity must be one of"):
            asymptotic_value(cone_params, 5.0, 1.0, "slope")

    def test_blowup_regime_has_no_law(self, degenerate_params):
        with pytest.raises(NotApplicable):
            asymptotic_value(degenerate_params, 1.0, 1.0)

    def test_integrated_slope_follows_corrected_law(self, cone_params):
        sol = integrate_zeta(cone_params, 5.0, IntegratorOptions(r_max=250.0))
        expected = asymptotic_value(cone_params, 5.0, 200.0, "psi_corrected")
        assert sol.psi_at(200.0) == pytest.approx(expected, abs=5e-4)

    def test_zero_forcing_slope_growth(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0)
        sol = integrate_zeta(params, 1.0, IntegratorOptions(r_max=200.0))
        ratio = sol.psi_at(200.0) / asymptotic_value(params, 1.0, 200.0, "psi")
        assert ratio == pytest.approx(1.0, abs=0.02)


class TestConeDefect:
    def test_defect_increases(self, cone_params):
        sol = integrate_zeta(cone_params, 5.0, IntegratorOptions(r_max=250.0))
        defect = v_shape_defect(sol, np.array([50.0, 100.0, 200.0]))
        assert np.all(np.diff(defect) > 0)
        assert defect[0] > 0

    def test_defect_needs_cone_regime(self, degenerate_params):
        sol = integrate_zeta(degenerate_params, 1.0)
        with pytest.raises(NotApplicable):
            v_shape_defect(sol, 1.0)


class TestSandwichBounds:
    def test_bounds_hold_for_negative_forcing(self, degenerate_params):
        report = sandwich_bounds(integrate_zeta(degenerate_params, 1.0))
        assert report["holds"]

    def test_bounds_hold_for_zero_forcing(self):
        params = FlowParams(N=3, alpha=2.0, b=0.0)
        report = sandwich_bounds(integrate_zeta(params, 1.0, IntegratorOptions(r_max=5.0)))
        assert report["holds"]

    def test_positive_forcing_not_applicable(self, cone_params):
        with pytest.raises(NotApplicable):
            sandwich_bounds(integrate_zeta(cone_params, 5.0, IntegratorOptions(r_max=5.0)))


class TestMonotonicity:
    def test_negative_forcing(self, degenerate_params):
        report = monotonicity_probe(degenerate_params, 0.5, 1.0, [0.2, 0.5, 0.8])
        assert all(m > 0 for m in report["margins"])
        low, high = report["r_inf"]
        assert high < low

    def test_negative_curvature(self, odd_params):
        report = monotonicity_probe(odd_params, 0.5, 0.7, [0.5, 1.0, 1.5], IntegratorOptions(r_max=1e5))
        assert all(m > 0 for m in report["margins"])
        low, high = report["r_inf"]
        assert high > low
        assert report["phi_end_ordered"] is None

    def test_entire_profiles(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0)
        report = monotonicity_probe(params, 1.0, 2.0, [0.5, 1.0, 2.0], IntegratorOptions(r_max=5.0))
        assert len(report["margins"]) == 3
        assert report["r_inf"] == [None, None]

    def test_rejects_unordered_speeds(self, degenerate_params):
        with pytest.raises(ValueError, match="need 0 < c1 < c2"):
            monotonicity_probe(degenerate_params, 1.0, 0.5, [0.5])

    def test_rejects_mixed_regimes(self, cone_params):
        with pytest.raises(ValueError, match="different regimes"):
            monotonicity_probe(cone_params, 3.0, 4.0, [0.5])

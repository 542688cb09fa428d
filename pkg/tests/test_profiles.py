"""Tests for the singular and regularized profile integrators."""

import math

import numpy as np
import pytest

from gmcf_translate.core import FlowParams, RegimeTag
from gmcf_translate.exceptions import DomainError, NotApplicable
from gmcf_translate.profiles import (
    CROSS_CHECK_EPS,
    IntegratorOptions,
    attach_r_infinity,
    estimate_r_infinity,
    integrate_psi_epsilon,
    integrate_zeta,
    make_forcing,
    series_coefficients,
    solve_profile,
    tail_integral,
)


class TestDegenerateExactProfile:
    """For ``b = -1, c = 0, alpha = 1`` the profile is ``zeta = r/2``, ``Phi = 2 - sqrt(4 - r^2)``."""

    def test_zeta_is_linear(self, degenerate_params):
        sol = integrate_zeta(degenerate_params, 0.0)
        r = np.linspace(0.0, 1.9, 39)
        np.testing.assert_allclose(sol.zeta_at(r), r / 2, atol=1e-8)

    def test_height_matches_sphere(self, degenerate_params):
        sol = integrate_zeta(degenerate_params, 0.0)
        r = np.linspace(0.0, 1.9, 39)
        np.testing.assert_allclose(sol.phi_at(r), 2.0 - np.sqrt(4.0 - r**2), atol=1e-8)

    def test_reaches_blowup_cutoff(self, degenerate_params):
        sol = integrate_zeta(degenerate_params, 0.0)
        assert sol.regime is RegimeTag.B_NEG
        assert sol.reached_cutoff
        assert sol.boundary_psi == math.inf

    def test_maximal_radius(self, degenerate_params):
        sol = attach_r_infinity(integrate_zeta(degenerate_params, 0.0))
        assert sol.r_inf == pytest.approx(2.0, abs=1e-4)
        assert sol.r_inf_bracket[0] <= 2.0 <= sol.r_inf_bracket[1] + 1e-9
        assert sol.phi_end == pytest.approx(2.0, abs=1e-4)

    def test_axis_curvature(self, degenerate_params):
        sol = integrate_zeta(degenerate_params, 0.0)
        assert sol.psi_prime_at(0.0) == pytest.approx(0.5)

    def test_series_coefficients(self, degenerate_params):
        assert series_coefficients(degenerate_params, 0.0) == pytest.approx((0.5, 0.0))


class TestRegimes:
    def test_flat_profile_when_speed_equals_forcing(self, cone_params):
        sol = integrate_zeta(cone_params, 3.0)
        assert sol.regime is RegimeTag.C_EQ_B
        assert sol.metadata["exact"] == "flat"
        assert sol.phi_at(10.0) == 0.0
        assert np.all(sol.psi == 0.0)

    def test_entire_profile_continues_in_slope_variable(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0)
        sol = integrate_zeta(params, 1.0, IntegratorOptions(r_max=50.0))
        assert sol.regime is RegimeTag.B_ZERO
        assert not sol.reached_cutoff
        assert sol.r_end == pytest.approx(50.0)
        assert sol.metadata["stages"] == ["LSODA", "LSODA/psi"]
        assert np.all(np.diff(sol.psi) > 0)

    def test_cone_profile_stays_below_cone_slope(self, cone_params):
        sol = integrate_zeta(cone_params, 5.0, IntegratorOptions(r_max=100.0))
        assert sol.regime is RegimeTag.C_GT_B_POS
        assert np.all(sol.psi < 4.0 / 3.0)

    def test_negative_curvature_profile_blows_down(self, odd_params):
        sol = attach_r_infinity(integrate_zeta(odd_params, 0.5, IntegratorOptions(r_max=1e5)))
        assert sol.regime is RegimeTag.B_GT_C_POS
        assert sol.reached_cutoff
        assert sol.zeta[-1] < 0
        assert sol.boundary_psi == -math.inf
        assert 2.0 <= sol.r_inf <= 16.0
        assert sol.phi_end < 0

    def test_entire_profile_has_no_maximal_radius(self):
        sol = integrate_zeta(FlowParams(N=2, alpha=1.0, b=0.0), 1.0, IntegratorOptions(r_max=5.0))
        assert attach_r_infinity(sol).r_inf is None
        with pytest.raises(NotApplicable):
            estimate_r_infinity(sol)

    def test_samples_are_read_only(self, degenerate_params):
        sol = integrate_zeta(degenerate_params, 0.0)
        with pytest.raises(ValueError):
            sol.zeta[0] = 1.0

    def test_outside_range_is_nan(self, degenerate_params):
        sol = integrate_zeta(degenerate_params, 0.0)
        assert math.isnan(sol.psi_at(3.0))


class TestMaximalRadiusLimits:
    def test_fast_speeds_approach_radius_floor(self, degenerate_params):
        radii = [estimate_r_infinity(integrate_zeta(degenerate_params, c))[0] for c in (10.0, 100.0, 1000.0)]
        assert radii[0] > radii[1] >= radii[2] - 1e-7
        # (N - 1)(-b)^(-1/alpha) = 1
        assert all(r > 1.0 - 1e-7 for r in radii)
        assert radii[0] < 1.0 + 1e-3
        assert radii[2] - 1.0 < 0.5 * (radii[0] - 1.0)

    def test_zero_speed_radius(self, degenerate_params):
        assert estimate_r_infinity(integrate_zeta(degenerate_params, 0.0))[0] == pytest.approx(2.0, abs=1e-4)

    def test_radius_grows_as_speed_nears_forcing(self):
        params = FlowParams.with_odd_alpha(N=2, q=1, p=1, b=1.0)
        opts = IntegratorOptions(r_max=1e5)
        radii = [estimate_r_infinity(integrate_zeta(params, c, opts))[0] for c in (0.9, 0.99, 0.999)]
        assert 2.0 < radii[0] < radii[1] < radii[2]
        assert radii[2] > 10.0

    def test_radius_grows_for_cube_root_exponent(self, odd_params):
        opts = IntegratorOptions(r_max=1e5)
        radii = [estimate_r_infinity(integrate_zeta(odd_params, c, opts))[0] for c in (0.5, 0.7, 0.9)]
        assert 2.0 < radii[0] < radii[1] < radii[2]


class TestForcing:
    def test_clipped_without_odd_exponent(self):
        forcing = make_forcing(FlowParams(N=2, alpha=1.0, b=1.0), 0.5)
        assert forcing(1.0) == 0.0

    def test_signed_with_odd_exponent(self):
        forcing = make_forcing(FlowParams.with_odd_alpha(N=2, q=1, p=1, b=1.0), 0.5)
        assert forcing(1.0) == pytest.approx(-0.5)

    def test_tail_integral_vanishes_on_empty_interval(self):
        assert tail_integral(1.0 - 1e-6, 1e-6, 0.0) == 0.0


class TestEpsilonOracle:
    def test_rejects_non_positive_eps(self, degenerate_params):
        with pytest.raises(DomainError, match="eps must be > 0"):
            integrate_psi_epsilon(degenerate_params, 1.0, 0.0)

    def test_tags_method_and_eps(self, degenerate_params):
        sol = integrate_psi_epsilon(degenerate_params, 1.0, 1e-3)
        assert sol.method == "psi_epsilon"
        assert sol.eps == 1e-3
        assert sol.reached_cutoff

    def test_carries_radius_estimate(self, degenerate_params):
        singular = solve_profile(degenerate_params, 1.0, cross_check=False)
        regularized = integrate_psi_epsilon(degenerate_params, 1.0, 1e-6)
        assert regularized.r_inf == pytest.approx(singular.r_inf, abs=1e-3)
        assert regularized.r_inf_bracket[0] <= regularized.r_inf <= regularized.r_inf_bracket[1]

    def test_close_to_singular_profile(self, degenerate_params):
        singular = integrate_zeta(degenerate_params, 1.0)
        regularized = integrate_psi_epsilon(degenerate_params, 1.0, 1e-6)
        r = np.linspace(0.0, 0.8, 17)
        np.testing.assert_allclose(regularized.psi_at(r), singular.psi_at(r), atol=1e-4)


class TestSolveProfile:
    def test_cross_check_in_blowup_regime(self, degenerate_params):
        sol = solve_profile(degenerate_params, 1.0)
        report = sol.metadata["cross_check"]
        assert report["monotone"]
        assert [row["eps"] for row in report["deviations"]] == list(CROSS_CHECK_EPS)
        assert all(row["enclosed"] for row in report["deviations"])
        assert 1.0 <= sol.r_inf <= 2.0

    def test_cross_check_for_entire_profile(self):
        params = FlowParams(N=3, alpha=2.0, b=0.0)
        sol = solve_profile(params, 1.0, IntegratorOptions(r_max=5.0))
        rows = sol.metadata["cross_check"]["deviations"]
        assert rows[-1]["eps"] == 1e-4
        assert rows[-1]["max_deviation"] < 1e-3

    def test_flat_profile_skips_cross_check(self, cone_params):
        sol = solve_profile(cone_params, 3.0)
        assert "cross_check" not in sol.metadata

    def test_cross_check_can_be_disabled(self, degenerate_params):
        sol = solve_profile(degenerate_params, 1.0, cross_check=False)
        assert "cross_check" not in sol.metadata
        assert sol.r_inf is not None


class TestIntegratorOptions:
    def test_defaults(self):
        opts = IntegratorOptions()
        assert opts.tol == 1e-10
        assert opts.zeta_cutoff == 1e-6

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError, match="tol must be in"):
            IntegratorOptions(tol=0.0)

    def test_rejects_low_switch(self):
        with pytest.raises(ValueError, match="zeta_switch"):
            IntegratorOptions(zeta_switch=0.3)

    def test_replace(self):
        assert IntegratorOptions().replace(r_max=2.0).r_max == 2.0

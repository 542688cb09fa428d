"""Tests for the method-of-lines evolution."""

import numpy as np
import pytest

from gmcf_translate.core import FlowParams
from gmcf_translate.evolve import (
    Hypothesis,
    InitialData,
    check_hypotheses,
    comparison_check,
    convergence_metric,
    evolve,
    init_state,
    perturbed_profile_data,
    profile_data,
    quadratic_data,
    sphere_cap_data,
    stability_bound,
    step,
)
from gmcf_translate.exceptions import (
    CFLViolation,
    CompatibilityError,
    DomainError,
    GridMismatch,
    RegimeError,
    SignLoss,
)
from gmcf_translate.models import EstimateReport, TravelingReference
from gmcf_translate.speed import translating_solution


@pytest.fixture()
def zero_forcing():
    return FlowParams(N=2, alpha=1.0, b=0.0, k=1.0)


@pytest.fixture()
def case_c():
    return FlowParams(N=2, alpha=1.0, b=3.0, k=1.0)


def dented(r):
    return 0.5 * r**2 + 0.5 * (1.0 - r**2) ** 2


class TestInitState:
    def test_quadratic(self, case_c):
        state = init_state(quadratic_data(1.0), case_c, M=64)
        assert state.M == 64
        assert state.dr == pytest.approx(1 / 64)
        assert state.u[-1] == pytest.approx(0.5)
        assert state.ur[0] == 0.0
        assert state.ur[-1] == 1.0
        assert state.t == 0.0

    def test_axis_compatibility(self, case_c):
        with pytest.raises(CompatibilityError, match=r"u0'\(0\) = 0"):
            init_state(lambda r: r, case_c, M=64)

    def test_boundary_compatibility(self, case_c):
        with pytest.raises(CompatibilityError, match=r"u0'\(1\) = k"):
            init_state(quadratic_data(0.5), case_c, M=64)

    def test_coarse_grid_rejected(self, case_c):
        with pytest.raises(DomainError, match="M must be >= 64"):
            init_state(quadratic_data(1.0), case_c, M=32)

    def test_infinite_slope_rejected(self, degenerate_params):
        with pytest.raises(DomainError, match="finite boundary slope"):
            init_state(quadratic_data(1.0), degenerate_params.replace(k="inf"), M=64)

    def test_array_size_must_match(self, case_c):
        with pytest.raises(GridMismatch):
            init_state(np.zeros(10), case_c, M=64)

    def test_nodal_array(self, case_c):
        r = np.linspace(0.0, 1.0, 65)
        state = init_state(0.5 * r**2, case_c, M=64)
        assert state.initial is None
        np.testing.assert_allclose(state.urr, 1.0)

    def test_sphere_cap_velocity(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0, k=1.0 / np.sqrt(3.0))
        state = init_state(sphere_cap_data(2.0), params, M=1024)
        r = state.r_grid
        np.testing.assert_allclose(state.H[:-1], 1.0, atol=1e-5)
        np.testing.assert_allclose(state.ut[:-1], 2.0 / np.sqrt(4.0 - r[:-1] ** 2), atol=1e-5)


class TestInitialData:
    def test_from_samples_reproduces_quadratic(self):
        r = np.linspace(0.0, 1.0, 33)
        data = InitialData.from_samples(r, 0.5 * r**2)
        x = np.array([0.1, 0.37, 0.9])
        np.testing.assert_allclose(data.u(x), 0.5 * x**2, atol=1e-12)
        np.testing.assert_allclose(data.d2u(x), 1.0, atol=1e-9)

    def test_from_samples_needs_full_interval(self):
        r = np.linspace(0.0, 0.9, 10)
        with pytest.raises(ValueError, match="cover"):
            InitialData.from_samples(r, r**2)

    def test_from_samples_needs_increasing_radii(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            InitialData.from_samples([0.0, 0.5, 0.5, 1.0], [0.0, 0.1, 0.1, 0.5])

    def test_sphere_cap_radius(self):
        with pytest.raises(ValueError, match="radius must be > 1"):
            sphere_cap_data(0.5)

    def test_perturbed_profile_keeps_slopes(self, zero_forcing):
        _, profile = translating_solution(zero_forcing)
        data = perturbed_profile_data(profile, amplitude=0.2)
        assert data.u(np.array([0.0]))[0] == pytest.approx(0.2)
        assert data.du(np.array([1.0]))[0] == pytest.approx(1.0, abs=1e-7)
        assert data.label == "perturbed-ts"


class TestHypotheses:
    def test_case_a(self, zero_forcing):
        tag = check_hypotheses(init_state(quadratic_data(1.0), zero_forcing, M=64))
        assert tag.case is Hypothesis.A
        assert tag.witnessed

    def test_case_b(self):
        params = FlowParams(N=2, alpha=1.0, b=-1.0, k=1.0)
        assert check_hypotheses(init_state(quadratic_data(1.0), params, M=64)).case is Hypothesis.B

    def test_case_c(self, case_c):
        assert check_hypotheses(init_state(quadratic_data(1.0), case_c, M=64)).case is Hypothesis.C

    def test_case_d(self):
        params = FlowParams.with_odd_alpha(N=2, q=1, p=3, b=3.0, k=-1.0)
        assert check_hypotheses(init_state(quadratic_data(-1.0), params, M=64)).case is Hypothesis.D

    def test_no_case(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0, k=-1.0)
        assert check_hypotheses(init_state(quadratic_data(-1.0), params, M=64)).case is Hypothesis.NONE

    def test_non_convex_data_fails_case_c(self, case_c):
        assert check_hypotheses(init_state(dented, case_c, M=64)).case is Hypothesis.NONE


class TestStep:
    def test_flat_data_moves_with_forcing(self):
        params = FlowParams(N=2, alpha=1.0, b=2.0, k=0.0)
        state = init_state(lambda r: np.full_like(r, 0.3), params, M=64)
        dt = 0.5 * stability_bound(state)
        new = step(state, dt)
        np.testing.assert_allclose(new.u, 0.3 + 2.0 * dt, rtol=1e-14)
        assert new.step_count == 1
        assert new.t == pytest.approx(dt)

    def test_stability_bound_for_flat_data(self):
        params = FlowParams(N=2, alpha=1.0, b=2.0, k=0.0)
        state = init_state(lambda r: np.zeros_like(r), params, M=64)
        assert stability_bound(state) == pytest.approx(0.2 / 64**2)

    def test_stability_bound_shrinks_in_higher_dimension(self):
        params = FlowParams(N=4, alpha=1.0, b=2.0, k=0.0)
        state = init_state(lambda r: np.zeros_like(r), params, M=64)
        assert stability_bound(state) == pytest.approx(0.1 / 64**2)

    def test_singular_diffusion_on_flat_data(self):
        params = FlowParams(N=2, alpha=0.5, b=2.0, k=0.0)
        state = init_state(lambda r: np.zeros_like(r), params, M=64)
        with pytest.raises(DomainError, match="degenerate diffusion"):
            stability_bound(state)
        with pytest.raises(DomainError, match="singular for alpha=0.5"):
            step(state, 1e-6)

    def test_rejects_large_step(self, case_c):
        state = init_state(quadratic_data(1.0), case_c, M=64)
        with pytest.raises(CFLViolation):
            step(state, 1.0)

    def test_rejects_non_positive_step(self, case_c):
        state = init_state(quadratic_data(1.0), case_c, M=64)
        with pytest.raises(CFLViolation):
            step(state, 0.0)

    def test_sign_loss(self, case_c):
        state = init_state(dented, case_c, M=64)
        with pytest.raises(SignLoss, match="lost its sign"):
            step(state, 0.5 * stability_bound(state))


class TestConvergence:
    def test_metric_of_shifted_reference(self, case_c):
        state = init_state(quadratic_data(1.0), case_c, M=64)
        ref = TravelingReference(c_tilde=4.0, phi=state.u - 5.0)
        raw, osc = convergence_metric(state, ref)
        assert raw == pytest.approx(5.0)
        assert osc == pytest.approx(0.0, abs=1e-12)

    def test_metric_grid_mismatch(self, case_c):
        state = init_state(quadratic_data(1.0), case_c, M=64)
        with pytest.raises(GridMismatch):
            convergence_metric(state, TravelingReference(c_tilde=4.0, phi=np.zeros(10)))

    def test_translating_solution_stays_put(self, zero_forcing):
        c_tilde, profile = translating_solution(zero_forcing)
        state = init_state(profile_data(profile), zero_forcing, M=64)
        ref = TravelingReference(c_tilde=c_tilde, phi=state.u.copy())
        final, record, report = evolve(state, 0.05, reference=ref)
        assert final.t == pytest.approx(0.05)
        assert record.times[-1] == pytest.approx(0.05)
        assert np.all(np.diff(record.times) > 0)
        assert max(record.oscillation) <= 1e-3
        assert isinstance(report, EstimateReport)
        assert report.Hstar_obs > 0

    def test_case_c_run(self, case_c):
        state = init_state(quadratic_data(1.0), case_c, M=64)
        seen = []
        snapshots = []
        final, record, _ = evolve(
            state, 0.2, observers=[lambda s: seen.append(s.t)], sample_interval=0.05, snapshots=snapshots
        )
        assert record.times == pytest.approx([0.0, 0.05, 0.1, 0.15, 0.2])
        assert seen == pytest.approx(record.times)
        assert len(snapshots) == 5
        assert min(record.front_speed) > 3.0
        assert final.step_count > 0
        assert record.mean_front_speed(0.1, 0.2) > 3.0

    def test_unverified_data_rejected(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0, k=-1.0)
        state = init_state(quadratic_data(-1.0), params, M=64)
        with pytest.raises(RegimeError, match="none of the cases"):
            evolve(state, 0.01)

    def test_final_time_must_exceed_start(self, case_c):
        state = init_state(quadratic_data(1.0), case_c, M=64)
        with pytest.raises(ValueError, match="T_final"):
            evolve(state, 0.0)


class TestComparison:
    def test_ordered_data_stays_ordered(self, zero_forcing):
        lower = init_state(quadratic_data(1.0), zero_forcing, M=64)
        upper = init_state(lambda r: 0.5 * r**2 + 0.1, zero_forcing, M=64)
        result = comparison_check(lower, upper, 0.005)
        assert result["ordered"]
        assert result["violation"] is None
        assert result["steps"] > 0
        assert result["min_gap"] == pytest.approx(0.1, abs=1e-9)

    def test_grid_mismatch(self, zero_forcing):
        lower = init_state(quadratic_data(1.0), zero_forcing, M=64)
        upper = init_state(quadratic_data(1.0), zero_forcing, M=128)
        with pytest.raises(GridMismatch):
            comparison_check(lower, upper, 0.005)

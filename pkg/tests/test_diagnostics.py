"""Tests for monitors, event logging and uniform-in-time estimate reports."""

import json

import numpy as np
import pytest

from gmcf_translate.core import FlowParams
from gmcf_translate.diagnostics import (
    CaseCMonitor,
    EventLog,
    IntersectionMonitor,
    assemble_report,
    count_sign_changes,
    curvature_floor,
    estimate_sample,
    initial_velocity_bounds,
    oracle_equivalence,
)
from gmcf_translate.evolve import init_state, quadratic_data, sphere_cap_data
from gmcf_translate.exceptions import GridMismatch, NotApplicable
from gmcf_translate.speed import find_speed


def sample(t, **overrides):
    values = {"t": t, "M0": 1.0, "M1": 1.0, "M2": 1.0, "Vmin": 1.0, "Vmax": 2.0, "Hmin": 0.5, "Hmax": 2.0}
    values.update(overrides)
    return values


class TestSignChanges:
    def test_alternating(self):
        assert count_sign_changes(np.array([1.0, -1.0, 1.0])) == 2

    def test_deadband_ignores_near_zero(self):
        assert count_sign_changes(np.array([1.0, 1e-15, -1.0])) == 1
        assert count_sign_changes(np.zeros(5)) == 0

    def test_empty(self):
        assert count_sign_changes(np.array([])) == 0


class TestEventLog:
    def test_write_json_lines(self, tmp_path):
        log = EventLog()
        log.record(0.5, "intersection", shift=0.25, before=0, after=1)
        log.record(1.0, "case_c", check="floor", margin=-0.1)
        path = log.write(tmp_path / "events.jsonl")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(log) == 2
        assert [json.loads(line)["monitor"] for line in lines] == ["intersection", "case_c"]
        assert json.loads(lines[0])["payload"] == {"after": 1, "before": 0, "shift": 0.25}

    def test_empty_log_writes_empty_file(self, tmp_path):
        path = EventLog().write(tmp_path / "events.jsonl")
        assert path.read_text(encoding="utf-8") == ""


class TestIntersectionMonitor:
    @pytest.fixture()
    def states(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0, k=1.0)
        above = init_state(lambda r: 0.5 * r**2 + 1.0, params, M=64)
        crossing = above.with_height(above.u - 1.0, 0.1)
        return above, crossing

    def test_counts_and_violation(self, states):
        above, crossing = states
        log = EventLog()
        monitor = IntersectionMonitor(np.zeros(65), 0.0, [0.25], event_log=log)
        monitor(above)
        monitor(crossing)
        assert monitor.trace.times == [0.0, 0.1]
        assert monitor.trace.counts["0.25"] == [0, 1]
        assert monitor.trace.violations == [{"time": 0.1, "shift": 0.25, "before": 0, "after": 1}]
        assert len(log) == 1

    def test_decreasing_count_is_not_a_violation(self, states):
        above, crossing = states
        monitor = IntersectionMonitor(np.zeros(65), 0.0, [0.25])
        monitor(crossing)
        monitor(above.with_height(above.u, 0.2))
        assert monitor.trace.counts["0.25"] == [1, 0]
        assert monitor.trace.violations == []

    def test_grid_mismatch(self, states):
        monitor = IntersectionMonitor(np.zeros(10), 0.0, [0.0])
        with pytest.raises(GridMismatch):
            monitor(states[0])


class TestEstimateReport:
    def test_sample_extrema(self):
        u = np.array([0.0, 1.0, 3.0])
        values = estimate_sample(1.0, u, u, -u, np.array([-1.0, -2.0, -3.0]), u + 1, 1.0, -1)
        assert values["M0"] == 2.0
        assert values["M2"] == 3.0
        assert values["Vmin"] == 1.0
        assert values["Hmin"] == 1.0
        assert values["Hmax"] == 3.0

    def test_steady_quantities_are_not_flagged(self):
        report = assemble_report([sample(t) for t in (0.0, 0.5, 1.0, 1.5, 2.0)])
        assert report.flagged == []
        assert report.windows == [[0.0, 1.0], [1.0, 2.0]]
        assert report.Hstar_obs == 0.5

    def test_late_growth_is_flagged(self):
        samples = [sample(t) for t in (0.0, 0.5, 1.0, 1.5)] + [sample(2.0, M0=1.1, Hmin=0.4)]
        report = assemble_report(samples)
        assert report.flagged == ["Hmin", "M0"]
        assert report.growth["M0"] == pytest.approx(0.1)
        assert report.growth["Hmin"] == pytest.approx(0.2)

    def test_needs_two_windows(self):
        with pytest.raises(ValueError, match="two disjoint windows"):
            assemble_report([sample(0.0)])

    def test_needs_samples(self):
        with pytest.raises(ValueError, match="at least one sample"):
            assemble_report([])


class TestInitialBounds:
    def test_sphere_cap(self):
        params = FlowParams(N=2, alpha=1.0, b=0.0, k=1.0 / np.sqrt(3.0))
        state = init_state(sphere_cap_data(2.0), params, M=512)
        bounds = initial_velocity_bounds(params, state.ur, state.H, state.ut)
        assert bounds["V_star"] <= bounds["ut_min"] + 1e-12
        assert bounds["ut_max"] <= bounds["V_sup"] + 1e-12
        assert bounds["V_star"] == pytest.approx(1.0, abs=1e-3)
        assert bounds["H_sup"] == pytest.approx(2.0 / np.sqrt(3.0), abs=1e-2)

    def test_positive_forcing_not_applicable(self):
        params = FlowParams(N=2, alpha=1.0, b=3.0, k=1.0)
        state = init_state(quadratic_data(1.0), params, M=64)
        with pytest.raises(NotApplicable):
            initial_velocity_bounds(params, state.ur, state.H, state.ut)


class TestCaseC:
    @pytest.fixture()
    def params(self):
        return FlowParams(N=2, alpha=1.0, b=3.0, k=1.0)

    def test_curvature_floor(self, params):
        c_tilde = find_speed(params).c_tilde
        floor, slope = curvature_floor(params, c_tilde, np.linspace(0.0, 1.0, 65))
        assert floor > 0
        assert slope.shape == (65,)
        assert slope[0] == 0.0
        assert np.all(np.diff(slope) > 0)

    def test_curvature_floor_needs_positive_forcing(self):
        with pytest.raises(NotApplicable):
            curvature_floor(FlowParams(N=2, alpha=1.0, b=0.0, k=1.0), 1.0, np.linspace(0.0, 1.0, 65))

    def test_monitor_passes_on_convex_data(self, params):
        state = init_state(quadratic_data(1.0), params, M=64)
        log = EventLog()
        monitor = CaseCMonitor(0.0, np.zeros(65), event_log=log)
        monitor(state)
        assert monitor.violations == []
        assert len(log) == 0

    def test_monitor_reports_floor_violation(self, params):
        state = init_state(quadratic_data(1.0), params, M=64)
        log = EventLog()
        monitor = CaseCMonitor(100.0, np.zeros(65), event_log=log)
        monitor(state)
        assert [v["check"] for v in monitor.violations] == ["floor"]
        assert log.events[0]["monitor"] == "case_c"


class TestOracleEquivalence:
    def test_blowup_profile(self, degenerate_params):
        report = oracle_equivalence(degenerate_params, 1.0)
        assert report["regime"] == "b_neg"
        assert report["monotone"]

    def test_flat_profile_has_zero_deviation(self, cone_params):
        report = oracle_equivalence(cone_params, 3.0)
        assert [row["max_deviation"] for row in report["deviations"]] == [0.0, 0.0, 0.0]

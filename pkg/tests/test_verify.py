"""Tests for the acceptance-suite registry and helpers."""

import numpy as np
import pytest

from gmcf_translate.verify import CRITERIA, format_table, refinement_ratio, run_suite, select


def test_all_criteria_registered():
    assert len(CRITERIA) == 12
    assert {"exact_degenerate", "flat", "speed_residual", "grid_convergence"} <= set(CRITERIA)


def test_select_by_group():
    names = [c.name for c in select(["exact"])]
    assert names == ["exact_degenerate", "flat"]


def test_select_by_name_and_group():
    names = {c.name for c in select(["flat", "asymptotics"])}
    assert names == {"flat", "asymptotic_exponent", "cone_slope"}


def test_select_all_by_default():
    assert len(select(None)) == len(CRITERIA)


def test_select_unknown_raises():
    with pytest.raises(ValueError, match="unknown criteria or groups"):
        select(["no_such_criterion"])


def test_run_flat_criterion():
    rows = run_suite(["flat"], quick=True)
    assert len(rows) == 1
    assert rows[0]["passed"]
    assert rows[0]["details"]["max_abs"] == 0.0
    assert "PASS" in format_table(rows)


def test_refinement_ratio_of_second_order_errors():
    coarse = np.full(5, 4.0)
    mid = np.full(9, 1.0)
    fine = np.full(17, 0.25)
    assert refinement_ratio(coarse, mid, fine) == pytest.approx(4.0)


def test_refinement_ratio_needs_nested_grids():
    with pytest.raises(ValueError, match="nested"):
        refinement_ratio(np.zeros(5), np.zeros(8), np.zeros(17))

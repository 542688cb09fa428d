"""End-to-end tests of the command-line interface."""

import json

import numpy as np
import pytest

from gmcf_translate.cli import build_parser, main
from gmcf_translate.config import OUTPUT_ROOT_ENV


@pytest.fixture(autouse=True)
def no_output_root(monkeypatch):
    monkeypatch.delenv(OUTPUT_ROOT_ENV, raising=False)


def run(tmp_path, *args):
    return main([*args, "--output-dir", str(tmp_path)])


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


class TestProfile:
    def test_writes_artifacts(self, tmp_path, capsys):
        assert run(tmp_path, "profile", "--n", "2", "--alpha", "1", "--b", "-1", "--c", "1") == 0
        doc = json.loads((tmp_path / "profile.json").read_text())
        assert doc["kind"] == "profile"
        assert doc["regime"] == "b_neg"
        assert 1.0 <= doc["r_inf"] <= 2.0
        assert doc["config"]["b"] == -1.0
        assert (tmp_path / "profile.csv").read_text().startswith("r,zeta,psi,phi\n")
        assert (tmp_path / "profile.plt").exists()
        assert "regime=b_neg" in capsys.readouterr().out

    def test_flat_profile_has_no_radius(self, tmp_path):
        assert run(tmp_path, "profile", "--b", "3", "--c", "3") == 0
        doc = json.loads((tmp_path / "profile.json").read_text())
        assert doc["r_inf"] is None
        assert doc["regime"] == "c_eq_b"

    def test_identical_runs_give_identical_files(self, tmp_path):
        args = ("profile", "--b", "-1", "--c", "0.5", "--no-cross-check")
        assert run(tmp_path, *args) == 0
        first = {name: (tmp_path / name).read_bytes() for name in ("profile.csv", "profile.json")}
        assert run(tmp_path, *args) == 0
        assert {name: (tmp_path / name).read_bytes() for name in first} == first

    def test_missing_speed(self, tmp_path, capsys):
        assert run(tmp_path, "profile", "--b", "-1") == 2
        assert capsys.readouterr().err.startswith("error code=2 kind=ValueError")

    def test_negative_curvature_without_odd_alpha(self, tmp_path, capsys):
        assert run(tmp_path, "profile", "--alpha", "0.5", "--b", "5", "--c", "3") == 2
        assert "kind=RegimeError" in capsys.readouterr().err

    def test_odd_alpha(self, tmp_path):
        assert run(tmp_path, "profile", "--alpha-odd", "1/3", "--b", "1", "--c", "0.5", "--no-cross-check") == 0
        doc = json.loads((tmp_path / "profile.json").read_text())
        assert doc["regime"] == "b_gt_c_pos"
        assert doc["phi_end"] < 0


class TestSpeed:
    def test_selects_speed(self, tmp_path, capsys):
        assert run(tmp_path, "speed", "--b", "0", "--k", "1") == 0
        doc = json.loads((tmp_path / "speed.json").read_text())
        assert doc["case"] == "a"
        assert abs(doc["residual"]) <= 1e-8
        assert doc["c_tilde"] > 0
        assert (tmp_path / "speed_profile.csv").exists()
        assert "case=a" in capsys.readouterr().out

    def test_inadmissible_slope(self, tmp_path, capsys):
        assert run(tmp_path, "speed", "--b", "-8", "--k", "1") == 2
        err = capsys.readouterr().err
        assert "kind=RegimeError" in err
        assert "(-b)^(1/alpha)" in err

    def test_vertical_slope(self, tmp_path):
        assert run(tmp_path, "speed", "--b", "-1.5", "--k-inf", "+") == 0
        doc = json.loads((tmp_path / "speed.json").read_text())
        assert doc["case"] == "b"
        assert doc["config"]["k_inf"] == "+"

    def test_vertical_slope_below_radius_floor(self, tmp_path, capsys):
        assert run(tmp_path, "speed", "--b", "-1", "--k-inf", "+") == 2
        assert "maximal radii stay above" in capsys.readouterr().err

    def test_slope_required(self, tmp_path):
        assert run(tmp_path, "speed", "--b", "0") == 2


class TestEvolve:
    def test_case_c_run(self, tmp_path):
        args = ("evolve", "--b", "3", "--k", "1", "--M", "64", "--T", "0.05", "--sample-interval", "0.01")
        assert run(tmp_path, *args) == 0
        for name in ("trajectory.csv", "convergence.csv", "convergence.plt", "convergence.json", "events.jsonl"):
            assert (tmp_path / name).exists()
        doc = json.loads((tmp_path / "convergence.json").read_text())
        assert doc["hypothesis"]["case"] == "C"
        assert doc["initial_data"] == "quadratic"
        assert doc["case_c"]["floor"] > 0
        table = np.loadtxt(tmp_path / "convergence.csv", delimiter=",", skiprows=1)
        assert table.shape == (6, 7)
        estimates = json.loads((tmp_path / "estimates.json").read_text())
        assert estimates["initial_bounds"] is None
        assert estimates["report"]["Hstar_obs"] > 0

    def test_incompatible_csv(self, tmp_path, capsys):
        r = np.linspace(0.0, 1.0, 101)
        u0 = tmp_path / "u0.csv"
        np.savetxt(u0, np.column_stack([r, r]), delimiter=",", header="r,u", comments="")
        assert run(tmp_path, "evolve", "--b", "3", "--k", "1", "--M", "64", "--u0", str(u0)) == 2
        assert "kind=CompatibilityError" in capsys.readouterr().err

    def test_missing_csv(self, tmp_path, capsys):
        missing = tmp_path / "missing.csv"
        assert run(tmp_path, "evolve", "--b", "3", "--k", "1", "--M", "64", "--u0", str(missing)) == 2
        assert "kind=FileNotFoundError" in capsys.readouterr().err

    def test_unverified_data_rejected(self, tmp_path, capsys):
        u0 = self._dented_csv(tmp_path)
        assert run(tmp_path, "evolve", "--b", "3", "--k", "1", "--M", "64", "--T", "0.01", "--u0", str(u0)) == 2
        assert "kind=RegimeError" in capsys.readouterr().err

    def test_sign_loss(self, tmp_path, capsys):
        u0 = self._dented_csv(tmp_path)
        args = ("evolve", "--b", "3", "--k", "1", "--M", "64", "--T", "0.01", "--u0", str(u0), "--allow-unverified")
        assert run(tmp_path, *args) == 3
        assert "kind=SignLoss" in capsys.readouterr().err

    @staticmethod
    def _dented_csv(tmp_path):
        r = np.linspace(0.0, 1.0, 201)
        u = 0.5 * r**2 + 0.5 * (1.0 - r**2) ** 2
        path = tmp_path / "dented.csv"
        np.savetxt(path, np.column_stack([r, u]), delimiter=",", header="r,u", comments="")
        return path


class TestSweep:
    def test_sweep_over_speed(self, tmp_path):
        args = ("sweep", "--b", "-1", "--over", "c", "--start", "0.5", "--stop", "2", "--num", "4", "--workers", "1")
        assert run(tmp_path, *args) == 0
        table = np.loadtxt(tmp_path / "sweep.csv", delimiter=",", skiprows=1)
        assert table.shape == (4, 3)
        assert np.all(np.diff(table[:, 1]) < 0)
        doc = json.loads((tmp_path / "sweep.json").read_text())
        assert [row["regime"] for row in doc["rows"]] == ["b_neg"] * 4

    def test_sweep_over_slope(self, tmp_path):
        args = ("sweep", "--b", "0", "--over", "k", "--start", "0.5", "--stop", "1.5", "--num", "3", "--workers", "1")
        assert run(tmp_path, *args) == 0
        table = np.loadtxt(tmp_path / "sweep.csv", delimiter=",", skiprows=1)
        assert np.all(np.diff(table[:, 1]) > 0)

    def test_empty_grid(self, tmp_path, capsys):
        assert run(tmp_path, "sweep", "--b", "-1", "--num", "0", "--workers", "1") == 2
        assert "the sweep grid is empty" in capsys.readouterr().err


class TestVerify:
    def test_single_criterion(self, tmp_path, capsys):
        assert run(tmp_path, "verify", "--only", "flat", "--quick") == 0
        doc = json.loads((tmp_path / "verify.json").read_text())
        assert doc["quick"] is True
        assert [row["name"] for row in doc["results"]] == ["flat"]
        assert "PASS" in capsys.readouterr().out

    def test_unknown_criterion(self, tmp_path):
        assert run(tmp_path, "verify", "--only", "nothing") == 2

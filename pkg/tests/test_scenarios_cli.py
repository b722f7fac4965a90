import json
import math
from pathlib import Path

import numpy as np
import pytest

from sectorflow import FamilyKind, construct_exact, field_to_csv, sample_stream
from sectorflow.cli import main
from sectorflow.domain import LogPolarGrid
from sectorflow.errors import ConfigError
from sectorflow.scenarios import parse_config, run_scenario

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestParseConfig:
    def test_ini_round_trip(self):
        scn = parse_config(CONFIGS / "thm1i.ini")
        assert scn.tag == "Thm1i"
        assert scn.solver["seed"] == "0"

    def test_json_accepted(self, tmp_path):
        cfg = {
            "scenario": {"name": "demo", "tag": "Cor1"},
            "ode": {"c": "1.0", "p": "-1.0", "f0_min": "-1.5", "f0_max": "1.5",
                    "f0_count": "7", "step": "5e-3"},
        }
        scn = parse_config(_write(tmp_path, "demo.json", json.dumps(cfg)))
        assert scn.tag == "Cor1"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "nope.ini")

    def test_unknown_tag(self, tmp_path):
        path = _write(tmp_path, "bad.ini", "[scenario]\ntag = Thm99\n")
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_theta0_out_of_range(self, tmp_path):
        path = _write(
            tmp_path,
            "bad.ini",
            "[scenario]\ntag = Thm3\n[domain]\ntheta0 = 3*pi\n"
            "[family]\nkind = pure_rotation\nalpha = 2\nc = 1\n",
        )
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_solve_tags_need_unit_annulus(self, tmp_path):
        path = _write(
            tmp_path,
            "bad.ini",
            "[scenario]\ntag = Thm1i\n[domain]\na = 1\nb = 3\ntheta0 = 1\n",
        )
        with pytest.raises(ConfigError):
            parse_config(path)


class TestRunScenario:
    def test_report_written(self, tmp_path):
        scn = parse_config(CONFIGS / "thm4_b2.ini")
        code, report = run_scenario(scn, tmp_path)
        assert code == 0
        saved = json.loads((tmp_path / "report.json").read_text())
        assert saved == report
        assert all(c["passed"] for c in report["checks"])


class TestCli:
    def test_exit_zero_on_pass(self, tmp_path, capsys):
        code = main(
            ["ode", "--config", str(CONFIGS / "cor1.ini"), "--out", str(tmp_path)]
        )
        assert code == 0
        assert "[PASS]" in capsys.readouterr().out

    def test_exit_two_on_config_error(self, tmp_path):
        bad = _write(tmp_path, "bad.ini", "[scenario]\ntag = Nope\n")
        assert main(["exact", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_exit_two_on_tag_subcommand_mismatch(self, tmp_path):
        code = main(
            ["ode", "--config", str(CONFIGS / "thm1i.ini"), "--out", str(tmp_path)]
        )
        assert code == 2

    def test_exit_one_on_failed_check(self, tmp_path, monkeypatch):
        # a stream whose Laplacian is not a function of the stream value
        grid = LogPolarGrid(0.0, math.log(2), 64, 64, 1.0)
        S, TH = grid.mesh()
        from sectorflow import ScalarField

        bad = ScalarField(grid, np.sin(3 * S) * np.cos(2 * TH) + S * TH)
        (tmp_path / "stream.csv").write_text(field_to_csv(bad))
        monkeypatch.chdir(tmp_path)
        code = main(
            [
                "verify",
                "--config", str(CONFIGS / "verify.ini"),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 1

    def test_exit_three_on_numerical_failure(self, tmp_path):
        cfg = _write(
            tmp_path,
            "blowup.ini",
            "[scenario]\nname = blowup\ntag = Thm4_B1\n"
            "[domain]\na = 1\nb = 2\ntheta0 = 2.0\n"
            "[grid]\nn_s = 32\nn_theta = 32\n"
            "[family]\nkind = tan\nv = 1.0\np = 0.0\nc = 0.0\n",
        )
        assert main(["exact", "--config", str(cfg), "--out", str(tmp_path)]) == 3

    def test_verify_subcommand(self, tmp_path, monkeypatch):
        grid = LogPolarGrid(0.0, math.log(2), 64, 64, 1.0)
        sol = construct_exact(FamilyKind.TAN, {"v": 1.0, "p": 0.0, "C": 0.0}, 1.0)
        (tmp_path / "stream.csv").write_text(field_to_csv(sample_stream(sol, grid)))
        monkeypatch.chdir(tmp_path)
        code = main(
            [
                "verify",
                "--config", str(CONFIGS / "verify.ini"),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 0

    def test_slide_subcommand(self, tmp_path):
        code = main(
            ["slide", "--config", str(CONFIGS / "slide.ini"), "--out", str(tmp_path)]
        )
        assert code == 0


class TestDeterminism:
    def test_repeat_runs_identical(self, tmp_path):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / run
            code = main(
                ["ode", "--config", str(CONFIGS / "cor1.ini"), "--out", str(out)]
            )
            assert code == 0
            outs.append(out)
        files_a = sorted(p.name for p in outs[0].iterdir())
        files_b = sorted(p.name for p in outs[1].iterdir())
        assert files_a == files_b and files_a
        for name in files_a:
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

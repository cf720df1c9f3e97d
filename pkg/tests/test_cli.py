"""End-to-end tests for the polarfade command line."""

from __future__ import annotations

import json
import logging

import pytest

from polarfade.cli import main
from polarfade.config import settings
from polarfade.exceptions import NumericError
from polarfade.harness import campaigns
from polarfade.harness.config_file import FIGURE_PRESETS
from polarfade.harness.output import read_code_description, write_ber_csv
from polarfade.models import CampaignConfig

EPSILON_CONFIG = """
[code]
n = 4

[channel]
q_grid = 1, 2
sigma_h2_grid = 1.0
"""

BER_CONFIG = """
[code]
n = 3

[channel]
q_grid = 2, 10

[campaign]
trials = 16
batch_size = 4
max_bit_errors = 0
"""


@pytest.fixture(autouse=True)
def _restore_root_logger():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def _write(tmp_path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _report(text: str) -> dict[str, str]:
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


class TestConstruct:
    def test_smallest_code(self, tmp_path):
        path = tmp_path / "code.txt"
        argv = ["construct", "--n", "1", "--k", "1", "--design-snr", "1.0", "--output", str(path)]
        assert main(argv) == 0
        assert path.read_text() == "N=2\nK=1\ndesign_snr=1.0\neps=0.0\n2\n"
        manifest = json.loads((tmp_path / "code.txt.manifest.json").read_text())
        assert manifest["command"] == "construct"
        assert manifest["outputs"] == [str(path)]

    def test_n_is_log2_of_blocklength(self, tmp_path):
        path = tmp_path / "code.txt"
        argv = ["construct", "--n", "2", "--k", "1", "--design-snr", "1.0", "--output", str(path)]
        assert main(argv) == 0
        assert path.read_text() == "N=4\nK=1\ndesign_snr=1.0\neps=0.0\n4\n"

    def test_rate_derives_k_and_design_snr(self, tmp_path):
        path = tmp_path / "code.txt"
        assert main(["construct", "--n", "10", "--rate", "0.5", "--output", str(path)]) == 0
        lines = path.read_text().splitlines()
        assert len(lines) == 4 + 512
        code = read_code_description(path)
        assert code.N == 1024
        assert code.K == 512
        assert code.design_snr == pytest.approx(1.044, rel=5e-3)

    def test_deterministic(self, tmp_path):
        first, second = tmp_path / "a.txt", tmp_path / "b.txt"
        for path in (first, second):
            assert main(["construct", "--n", "8", "--k", "100", "--output", str(path)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_default_output_location(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "output_dir", str(tmp_path))
        assert main(["construct", "--n", "3", "--k", "4", "--design-snr", "2.0"]) == 0
        assert (tmp_path / "polar_n3_k4.txt").exists()

    def test_k_and_rate_are_exclusive(self, tmp_path):
        assert main(["construct", "--n", "4", "--k", "8", "--rate", "0.5"]) == 2

    def test_k_out_of_range(self, tmp_path):
        argv = ["construct", "--n", "2", "--k", "5", "--output", str(tmp_path / "c.txt")]
        assert main(argv) == 2


class TestCapacity:
    def test_zero_power(self, capsys):
        assert main(["capacity", "--power", "0"]) == 0
        report = _report(capsys.readouterr().out)
        assert report["power"] == "0"
        assert abs(float(report["rate"])) < 1e-8

    def test_design_power_for_rate(self, capsys):
        assert main(["capacity", "--rate", "0.5"]) == 0
        report = _report(capsys.readouterr().out)
        assert float(report["power"]) == pytest.approx(1.044, rel=5e-3)

    def test_erasure_report(self, capsys, tmp_path):
        csv = tmp_path / "cap.csv"
        argv = ["capacity", "--rate", "0.5", "--Q", "2", "--fading", "gaussian:1.0", "--csv", str(csv)]
        assert main(argv) == 0
        report = _report(capsys.readouterr().out)
        eps = float(report["epsilon"])
        assert 0.0 < eps < 1.0
        assert float(report["c_eq"]) == pytest.approx(0.5 * (1.0 - eps), rel=1e-9)
        assert csv.read_text().splitlines()[0].startswith("power,rate,sigma2,q,qpeak")

    def test_infeasible_exits_3(self):
        argv = ["capacity", "--power", "1", "--Q", "10", "--Qpeak", "0.1", "--fading", "uniform:1,2"]
        assert main(argv) == 3

    def test_unknown_fading_exits_2(self):
        assert main(["capacity", "--power", "1", "--Q", "1", "--fading", "nakagami:2"]) == 2


class TestSweep:
    def test_epsilon_sweep_and_replay(self, tmp_path):
        config = _write(tmp_path, "eps.ini", EPSILON_CONFIG)
        first_dir, replay_dir = tmp_path / "first", tmp_path / "replay"

        argv = ["sweep", "--figure", "3", "--config", config, "--output-dir", str(first_dir)]
        assert main(argv) == 0
        csv = first_dir / "eps_vs_q.csv"
        assert csv.read_text().splitlines()[0] == "q,sigma_h2,p_design,delta,epsilon"
        assert len(csv.read_text().splitlines()) == 3

        manifest = first_dir / "eps_vs_q.csv.manifest.json"
        argv = ["sweep", "--from-manifest", str(manifest), "--output-dir", str(replay_dir)]
        assert main(argv) == 0
        assert (replay_dir / "eps_vs_q.csv").read_bytes() == csv.read_bytes()

    def test_ber_sweep_independent_of_threads(self, tmp_path):
        config = _write(tmp_path, "ber.ini", BER_CONFIG)
        outputs = []
        for threads in ("1", "3"):
            out = tmp_path / f"t{threads}"
            argv = [
                "sweep", "--figure", "5", "--config", config, "--seed", "4",
                "--threads", threads, "--output-dir", str(out),
            ]
            assert main(argv) == 0
            outputs.append((out / "ber_vs_q.csv").read_bytes())
        assert outputs[0] == outputs[1]
        header, *rows = outputs[0].decode().splitlines()
        assert header == "q,scheme,n,k,trials,bit_errors,ber,ci95"
        assert [row.split(",")[:5] for row in rows] == [
            ["2", "proposed", "3", "4", "16"],
            ["2", "mixture_design", "3", "4", "16"],
            ["10", "proposed", "3", "4", "16"],
            ["10", "mixture_design", "3", "4", "16"],
        ]

    def test_seeded_figure_preset_matches_library_run(self, tmp_path):
        expected = tmp_path / "expected.csv"
        config = CampaignConfig(**{**FIGURE_PRESETS[5], "n": 6, "trials": 1000, "master_seed": 7})
        write_ber_csv(campaigns.run_ber_campaign(config, threads=1), expected)

        for threads in ("1", "4"):
            out = tmp_path / f"t{threads}"
            argv = [
                "sweep", "--figure", "5", "--seed", "7", "--trials", "1000", "--n", "6",
                "--threads", threads, "--output-dir", str(out),
            ]
            assert main(argv) == 0
            assert (out / "ber_vs_q.csv").read_bytes() == expected.read_bytes()

    def test_manifest_records_seed_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "seed", 9)
        config = _write(tmp_path, "eps.ini", EPSILON_CONFIG)
        argv = ["sweep", "--figure", "3", "--config", config, "--output-dir", str(tmp_path)]
        assert main(argv) == 0
        manifest = json.loads((tmp_path / "eps_vs_q.csv.manifest.json").read_text())
        assert manifest["master_seed"] == 9
        assert manifest["config"]["master_seed"] == 9
        assert manifest["diagnostics"]["numerics"]["threshold_solves"] == 2

    def test_seed_flag_beats_environment(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "seed", 9)
        config = _write(tmp_path, "eps.ini", EPSILON_CONFIG)
        argv = [
            "sweep", "--figure", "3", "--config", config, "--seed", "1",
            "--output-dir", str(tmp_path),
        ]
        assert main(argv) == 0
        manifest = json.loads((tmp_path / "eps_vs_q.csv.manifest.json").read_text())
        assert manifest["master_seed"] == 1

    def test_bad_config_exits_2(self, tmp_path):
        config = _write(tmp_path, "bad.ini", "[code]\nblocklength = 4\n")
        assert main(["sweep", "--figure", "3", "--config", config]) == 2

    def test_missing_figure_exits_2(self, tmp_path):
        assert main(["sweep", "--output-dir", str(tmp_path)]) == 2

    def test_manifest_and_config_conflict(self, tmp_path):
        config = _write(tmp_path, "eps.ini", EPSILON_CONFIG)
        argv = ["sweep", "--from-manifest", "m.json", "--config", config]
        assert main(argv) == 2

    def test_replaying_a_construct_manifest_exits_2(self, tmp_path):
        path = tmp_path / "code.txt"
        main(["construct", "--n", "2", "--k", "2", "--design-snr", "1.0", "--output", str(path)])
        argv = ["sweep", "--from-manifest", str(tmp_path / "code.txt.manifest.json")]
        assert main(argv) == 2

    def test_numeric_failure_exits_3(self, tmp_path, monkeypatch):
        def fail(config):
            raise NumericError("quadrature did not converge")

        monkeypatch.setattr(campaigns, "sweep_epsilon_vs_q", fail)
        argv = ["sweep", "--figure", "3", "--output-dir", str(tmp_path)]
        assert main(argv) == 3

    def test_unexpected_failure_exits_1(self, tmp_path, monkeypatch):
        def fail(config):
            raise RuntimeError("boom")

        monkeypatch.setattr(campaigns, "sweep_epsilon_vs_q", fail)
        argv = ["sweep", "--figure", "3", "--output-dir", str(tmp_path)]
        assert main(argv) == 1


def test_version_exits_cleanly(capsys):
    assert main(["--version"]) == 0
    assert "polarfade" in capsys.readouterr().out

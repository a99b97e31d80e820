"""CLI golden files, exit codes, config handling, and determinism."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import pytest

from tagreuse import cli

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"
GOLDEN = ROOT / "tests" / "golden"


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(autouse=True)
def _run_from_package_root(monkeypatch):
    # golden outputs echo the relative input paths
    monkeypatch.chdir(ROOT)


GOLDEN_CASES = {
    "stats": (
        ["stats", "--assignments", "tests/data/assignments.tsv",
         "--network", "tests/data/network.tsv"],
        [],
    ),
    "classify": (
        ["classify", "--assignments", "tests/data/assignments.tsv",
         "--network", "tests/data/network.tsv", "--per-assignment", "{tmp}/labels.tsv"],
        ["labels.tsv"],
    ),
    "recency": (
        ["recency", "--assignments", "tests/data/assignments.tsv",
         "--network", "tests/data/network.tsv", "--bins", "10",
         "--min-hours", "0.01", "--max-hours", "100", "--outdir", "{tmp}"],
        ["individual.tsv", "social.tsv"],
    ),
    "recommend": (
        ["recommend", "--assignments", "tests/data/assignments.tsv",
         "--network", "tests/data/network.tsv", "--algo", "bll_is",
         "--user", "u1", "--at", "600", "--k", "5"],
        [],
    ),
    "evaluate": (
        ["evaluate", "--assignments", "tests/data/assignments.tsv",
         "--network", "tests/data/network.tsv",
         "--config", "tests/data/evaluate.cfg", "--outdir", "{tmp}"],
        ["bll_i.tsv", "bll_s.tsv", "bll_is.tsv", "cf.tsv", "mp.tsv"],
    ),
    "generate": (
        ["generate", "--seed-users", "4", "--followees-per-seed", "2",
         "--background-users", "6", "--vocab-size", "30",
         "--tweets-per-user", "12", "--rng-seed", "99", "--outdir", "{tmp}"],
        ["assignments.tsv", "network.tsv", "ground_truth.tsv"],
    ),
}


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden_outputs(name, capsys, tmp_path):
    argv_template, files = GOLDEN_CASES[name]
    argv = [a.replace("{tmp}", str(tmp_path)) for a in argv_template]
    code, out, _ = run_cli(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / f"{name}.stdout.json").read_text(encoding="utf-8")
    for fname in files:
        produced = (tmp_path / fname).read_bytes()
        assert produced == (GOLDEN / f"{name}.{fname}").read_bytes(), fname


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_determinism_across_runs_and_worker_counts(name, capsys, tmp_path):
    argv_template, files = GOLDEN_CASES[name]
    outputs = []
    for run, workers in ((1, "1"), (2, "4")):
        rundir = tmp_path / f"run{run}"
        rundir.mkdir()
        argv = [a.replace("{tmp}", str(rundir)) for a in argv_template]
        code, out, _ = run_cli(capsys, *argv, "--workers", workers)
        assert code == 0
        blobs = {"stdout": out.encode()}
        for fname in files:
            blobs[fname] = (rundir / fname).read_bytes()
        outputs.append(blobs)
    assert outputs[0] == outputs[1]


def test_inputs_are_not_mutated(capsys, tmp_path):
    before = {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in (DATA / "assignments.tsv", DATA / "network.tsv")
    }
    for name in ("stats", "classify", "recency", "evaluate"):
        argv_template, _ = GOLDEN_CASES[name]
        rundir = tmp_path / name
        rundir.mkdir()
        code, _, _ = run_cli(capsys, *[a.replace("{tmp}", str(rundir)) for a in argv_template])
        assert code == 0
    after = {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in (DATA / "assignments.tsv", DATA / "network.tsv")
    }
    assert before == after


def test_no_temp_files_left_behind(capsys, tmp_path):
    argv_template, _ = GOLDEN_CASES["recency"]
    run_cli(capsys, *[a.replace("{tmp}", str(tmp_path)) for a in argv_template])
    assert not list(tmp_path.glob("*.tmp"))


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 1
        assert "usage" in err.lower()

    def test_no_subcommand(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 1

    def test_missing_input_file_exits_2_with_path(self, capsys):
        code, _, err = run_cli(
            capsys, "stats", "--assignments", "no/such/file.tsv",
            "--network", "tests/data/network.tsv",
        )
        assert code == 2
        assert "no/such/file.tsv" in err

    def test_missing_required_option(self, capsys):
        code, _, err = run_cli(capsys, "stats", "--assignments", "tests/data/assignments.tsv")
        assert code == 1
        assert "--network" in err

    def test_bad_flag_value(self, capsys):
        code, _, _ = run_cli(
            capsys, "recommend", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--algo", "bll_i",
            "--user", "u1", "--at", "notanumber",
        )
        assert code == 1

    def test_out_of_range_parameter(self, capsys):
        code, _, _ = run_cli(
            capsys, "recommend", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--algo", "bll_is",
            "--user", "u1", "--at", "600", "--beta", "3.0",
        )
        assert code == 1

    def test_unknown_user_is_a_data_error(self, capsys):
        code, _, err = run_cli(
            capsys, "recommend", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--algo", "bll_i",
            "--user", "nobody", "--at", "600",
        )
        assert code == 2
        assert "nobody" in err

    def test_malformed_data_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("u1\tt1\tnot_a_ts\talpha\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys, "stats", "--assignments", str(bad),
            "--network", "tests/data/network.tsv",
        )
        assert code == 2

    def test_invalid_generator_params_exit_1(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys, "generate", "--p-individual", "0.9", "--p-social", "0.9",
            "--p-network", "0.0", "--p-external", "0.0", "--outdir", str(tmp_path),
        )
        assert code == 1

    def test_bad_workers_value(self, capsys):
        code, _, _ = run_cli(
            capsys, "stats", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--workers", "0",
        )
        assert code == 1


class TestConfigFile:
    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("kmax=2\nneighbors=5\n", encoding="utf-8")
        outdir = tmp_path / "out"
        code, out, _ = run_cli(
            capsys, "evaluate", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--config", str(cfg),
            "--kmax", "3", "--algos", "mp", "--outdir", str(outdir),
        )
        assert code == 0
        report = json.loads(out)
        assert report["k_max"] == 3  # flag beat the config file
        assert report["meta"]["config"]["neighbors"] == 5  # config file applied

    def test_unknown_config_key_is_usage_error(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("does_not_exist=1\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys, "stats", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--config", str(cfg),
        )
        assert code == 1
        assert "does_not_exist" in err

    def test_missing_config_file_is_data_error(self, capsys):
        code, _, _ = run_cli(
            capsys, "stats", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--config", "no/conf.cfg",
        )
        assert code == 2

    def test_config_can_supply_required_options(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "assignments=tests/data/assignments.tsv\nnetwork=tests/data/network.tsv\n",
            encoding="utf-8",
        )
        code, out, _ = run_cli(capsys, "stats", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["hashtag_assignments"] == 10


class TestOutputOptions:
    def test_out_file_matches_stdout_payload(self, capsys, tmp_path):
        argv, _ = GOLDEN_CASES["stats"]
        code, out, _ = run_cli(capsys, *argv)
        target = tmp_path / "stats.json"
        code2, out2, _ = run_cli(capsys, *argv, "--out", str(target))
        assert code == code2 == 0
        assert out2 == ""
        assert target.read_text(encoding="utf-8") == out

    def test_rerank_flag_runs_end_to_end(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys, "evaluate", "--assignments", "tests/data/assignments.tsv",
            "--network", "tests/data/network.tsv", "--algos", "bll_is", "--kmax", "3",
            "--rerank", "hybrid", "--lambda", "0.5", "--outdir", str(tmp_path),
        )
        assert code == 0
        report = json.loads(out)
        rows = report["algorithms"]["bll_is"]
        assert all("ild" in row and "serendipity" in row for row in rows)
        header = (tmp_path / "bll_is.tsv").read_text().splitlines()[1]
        assert header == "# k\tprecision\trecall\tild\tserendipity"

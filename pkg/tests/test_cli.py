import json
from pathlib import Path

import pytest

from sammrc.cli import main
from sammrc.evaluator import gold_predictions, save_predictions
from sammrc.generator import GenerationConfig, generate_set, load_challenge, write_set


@pytest.fixture(scope="module")
def challenge_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "set"
    write_set(generate_set(GenerationConfig(seed=21, size=12)), out)
    return out


@pytest.fixture(scope="module")
def gold_file(challenge_dir, tmp_path_factory):
    path = tmp_path_factory.mktemp("preds") / "gold.json"
    save_predictions(gold_predictions(load_challenge(challenge_dir)), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerate:
    def test_generate_writes_set(self, tmp_path, capsys):
        out = tmp_path / "g"
        code, stdout, _ = run(capsys, "generate", "--seed", 4, "--size", 2, "--out", out, "--jobs", 1)
        assert code == 0
        assert (out / "challenge.json").exists()
        assert (out / "meta.jsonl").exists()

    def test_generate_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(capsys, "generate", "--seed", 42, "--size", 3, "--out", a, "--jobs", 1)[0] == 0
        assert run(capsys, "generate", "--seed", 42, "--size", 3, "--out", b, "--jobs", 1)[0] == 0
        assert (a / "challenge.json").read_bytes() == (b / "challenge.json").read_bytes()
        assert (a / "meta.jsonl").read_bytes() == (b / "meta.jsonl").read_bytes()

    def test_refuses_overwrite_without_force(self, tmp_path, capsys):
        out = tmp_path / "g"
        assert run(capsys, "generate", "--seed", 1, "--size", 1, "--out", out, "--jobs", 1)[0] == 0
        code, _, err = run(capsys, "generate", "--seed", 1, "--size", 1, "--out", out, "--jobs", 1)
        assert code == 1 and "not empty" in err
        assert run(capsys, "generate", "--seed", 1, "--size", 1, "--out", out, "--force", "--jobs", 1)[0] == 0

    def test_validation_error_exit_code(self, tmp_path, capsys):
        code, _, err = run(capsys, "generate", "--seed", 1, "--size", 0, "--out", tmp_path / "x")
        assert code == 1 and err


class TestEvaluate:
    def test_gold_predictions_score_one(self, challenge_dir, gold_file, capsys):
        code, stdout, _ = run(capsys, "evaluate", "--challenge", challenge_dir,
                              "--predictions", gold_file, "--by-category", "--by-n-sam")
        assert code == 0
        assert "dice=1.000" in stdout

    def test_empty_basis_exit_code_two(self, challenge_dir, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        challenge = load_challenge(challenge_dir)
        save_predictions({i.id: "no such thing" for i in challenge.all_instances()}, bad)
        code, _, err = run(capsys, "evaluate", "--challenge", challenge_dir, "--predictions", bad)
        assert code == 2
        assert "undefined" in err

    def test_report_directory(self, challenge_dir, gold_file, tmp_path, capsys):
        report = tmp_path / "report"
        code, stdout, _ = run(capsys, "evaluate", "--challenge", challenge_dir,
                              "--predictions", gold_file, "--report", report)
        assert code == 0
        assert (report / "report.json").exists()
        assert (report / "breakdown.csv").exists()
        assert (report / "dice_by_category.png").exists()
        assert (report / "dice_by_n_sam.png").exists()
        payload = json.loads((report / "report.json").read_text())
        assert payload["dice"] == 1.0

    def test_machine_readable_output(self, challenge_dir, gold_file, capsys):
        code, stdout, _ = run(capsys, "evaluate", "--challenge", challenge_dir,
                              "--predictions", gold_file)
        payload = json.loads(stdout.strip().splitlines()[-1])
        assert set(payload) >= {"dice", "ci", "n_basis", "acc_b", "acc_i", "acc_c",
                                "by_category", "by_n_sam"}


class TestBaselineAndCompare:
    def test_baseline_roundtrip(self, challenge_dir, tmp_path, capsys):
        preds = tmp_path / "random.json"
        code, _, _ = run(capsys, "baseline", "--type", "random", "--challenge", challenge_dir,
                         "--seed", 3, "--out", preds)
        assert code == 0
        payload = json.loads(preds.read_text())
        challenge = load_challenge(challenge_dir)
        assert set(payload) == {i.id for i in challenge.all_instances()}

    def test_compare_gold_vs_gold(self, challenge_dir, gold_file, capsys):
        code, stdout, _ = run(capsys, "compare", "--challenge", challenge_dir,
                              "--predictions-a", gold_file, "--predictions-b", gold_file)
        assert code == 0
        assert "p = 1" in stdout


class TestDiagnostics:
    def test_stats(self, challenge_dir, capsys):
        code, stdout, _ = run(capsys, "stats", "--challenge", challenge_dir)
        payload = json.loads(stdout)
        assert payload["passages"] == 12
        assert payload["avg_words"] > 50

    def test_quality(self, challenge_dir, capsys):
        code, stdout, _ = run(capsys, "quality", "--challenge", challenge_dir, "--pairs", 30)
        assert code == 0
        payload = json.loads(stdout)
        assert 0 <= payload["lexical_similarity"] <= 1

    def test_scan_own_interventions(self, challenge_dir, capsys):
        code, stdout, _ = run(capsys, "scan", "--corpus", challenge_dir / "challenge.json",
                              "--window", 100)
        assert code == 0
        payload = json.loads(stdout)
        # a third of the instances are interventions and each carries one
        assert payload["frac_with_expression"] >= 0.3

    def test_inspect(self, challenge_dir, capsys):
        code, stdout, _ = run(capsys, "inspect", "--challenge", challenge_dir, "--id", 1)
        assert code == 0
        assert "[baseline]" in stdout and "[intervention]" in stdout and "<<" in stdout

    def test_inspect_unknown_id(self, challenge_dir, capsys):
        code, _, err = run(capsys, "inspect", "--challenge", challenge_dir, "--id", 999)
        assert code == 1 and "999" in err


class TestDataDirOverride:
    def test_sam_data_dir_env(self, tmp_path, monkeypatch, capsys):
        import shutil

        from sammrc.resources import data_dir

        override = tmp_path / "data"
        shutil.copytree(data_dir(), override)
        monkeypatch.setenv("SAM_DATA_DIR", str(override))
        assert data_dir() == override
        out = tmp_path / "set"
        code, _, _ = run(capsys, "generate", "--seed", 2, "--size", 1, "--out", out, "--jobs", 1)
        assert code == 0

    def test_missing_data_file_reported(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SAM_DATA_DIR", str(tmp_path))  # empty directory
        out = tmp_path / "set"
        code, _, err = run(capsys, "generate", "--seed", 2, "--size", 1, "--out", out, "--jobs", 1)
        assert code == 1 and "SAM_DATA_DIR" in err

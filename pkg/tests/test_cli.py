import json

import pytest

from grfstream.cli import main

SMALL = ["--learner", "gnb", "--base-size", "100", "--replications", "3", "--pretrain-size", "100"]


def test_run_json(capsys):
    assert main(["run", *SMALL, "--json", "--no-timing"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["learner"] == "gnb" and report["grf"] is True
    assert report["n_evaluated"] == 200
    assert "processing_time_s" not in report


def test_run_without_grf_text(capsys):
    assert main(["run", *SMALL, "--no-use-grf"]) == 0
    out = capsys.readouterr().out
    assert "kappa" in out


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"learner": "pa", "base_size": 100, "replications": 3, "pretrain_size": 100}))
    assert main(["run", "--config", str(cfg), "--json", "--no-timing"]) == 0
    assert json.loads(capsys.readouterr().out)["learner"] == "pa"
    assert main(["run", "--config", str(cfg), "--learner", "gnb", "--json", "--no-timing"]) == 0
    assert json.loads(capsys.readouterr().out)["learner"] == "gnb"


def test_pair_table(tmp_path, capsys):
    records = tmp_path / "runs.jsonl"
    assert main(["pair", *SMALL, "--repetitions", "2", "--no-timing", "--records", str(records)]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.split("\t")[:3] == ["experiment", "dataset", "learner"]
    assert "time_base_mean" not in header
    assert row.startswith("circle_concept1/gnb\t")
    assert len(records.read_text().splitlines()) == 4


def test_dump_grf(capsys):
    assert main(["dump-grf", "--resolution", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x\tfield_index\tvalue"
    assert len(lines) == 1 + 3 * 3
    assert lines[5] == "0.5\t2\t1.0"


def test_suite_list(capsys):
    assert main(["suite", "--list"]) == 0
    assert set(capsys.readouterr().out.split()) >= {"cost", "smoke", "synthetic", "table9"}


def test_smoke_suite_is_byte_identical(tmp_path, capsys):
    outputs = []
    for name in ("a", "b"):
        assert main(["suite", "smoke", "--out", str(tmp_path / name), "--no-timing"]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    for fname in ("summary.tsv", "runs.jsonl", "learners.tsv", "failures.tsv"):
        assert (tmp_path / "a" / fname).read_bytes() == (tmp_path / "b" / fname).read_bytes()


def test_suite_failure_exit_code(tmp_path, capsys):
    suite = tmp_path / "s.json"
    suite.write_text(json.dumps({"experiments": [
        {"learner": "gnb", "base_size": 100, "replications": 3, "pretrain_size": 100},
        {"learner": "gnb", "base_size": 100, "replications": 1, "pretrain_size": 100},
    ]}))
    assert main(["suite", str(suite), "--out", str(tmp_path / "out"), "--no-timing"]) == 1
    assert "FAILED" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["run", "--dataset", "nope"],
    ["run", "--learner", "svm"],
    ["run", "--config", "/no/such/file.json"],
    ["suite", "no-such-suite"],
    ["suite"],
])
def test_bad_input_exit_code(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_runtime_failure_exit_code(capsys):
    assert main(["run", *SMALL, "--pretrain-size", "300"]) == 1
    assert "pretrain_size" in capsys.readouterr().err


def test_suite_only_accepts_long_learner_names(tmp_path, capsys):
    assert main(["suite", "smoke", "--only", "GaussianNB", "--out", str(tmp_path), "--no-timing"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert rows and all(r.split("\t")[0] == "gnb" for r in rows)

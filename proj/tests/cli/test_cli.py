"""Command-line tests for the avcons executable.

The binary path comes from the AVCONS_BIN environment variable.
"""

import json
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("AVCONS_BIN", "avcons")
FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "e2e"


def run(*args, env=None, cwd=None):
    full_env = dict(os.environ)
    full_env.pop("AVCONS_REPORT_DIR", None)
    if env:
        full_env.update(env)
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, env=full_env, cwd=cwd)


def write_jsonl(path, schema, records):
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({"schema": schema}) + "\n")
        for r in records:
            f.write(json.dumps(r) + "\n")


def read_records(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return json.loads(lines[0]), [json.loads(line) for line in lines[1:] if line.strip()]


def entry(video_id, label, paths, **extra):
    rec = {"video_id": video_id, "label": label, "dataset": "D", "fps": 25, "paths": paths}
    rec.update(extra)
    return rec


@pytest.fixture
def small(tmp_path):
    write_jsonl(tmp_path / "t.jsonl", "avcons.transcripts/v1", [
        {"video_id": "a", "reference": "the cat sat down", "hypothesis": "the bat sat"},
        {"video_id": "b", "reference": ["ONE", "TWO"], "hypothesis": ["ONE", "TWO"]},
        {"video_id": "c", "reference": "", "hypothesis": "noise"},
    ])
    write_jsonl(tmp_path / "m.jsonl", "avcons.manifest/v1", [
        entry("a", "fake", {"transcripts": "t.jsonl"}, deepfake_mode="RVFA"),
        entry("b", "genuine", {"transcripts": "t.jsonl"}),
        entry("c", "fake", {"transcripts": "t.jsonl"}, deepfake_mode="RVFA"),
    ])
    return tmp_path


def test_score_ccfd_only(small):
    out = small / "scores.jsonl"
    r = run("score", "-m", small / "m.jsonl", "--systems", "ccfd", "-o", out)
    assert r.returncode == 0, r.stderr
    header, records = read_records(out)
    assert header["schema"] == "avcons.scores/v1"
    assert header["systems"] == ["CCFD"]
    wer = {rec["video_id"]: rec["raw"]["CCFD_WER"] for rec in records}
    assert wer == {"a": 0.5, "b": 0.0, "c": "inf"}
    assert [rec["video_id"] for rec in records] == ["a", "b", "c"]


def test_score_then_evaluate_ccfd(small):
    run("score", "-m", small / "m.jsonl", "--systems", "ccfd", "-o", small / "s.jsonl")
    r = run("evaluate", "-s", small / "s.jsonl", "-m", small / "m.jsonl", "-r", small / "rep", "--format", "machine")
    assert r.returncode == 0, r.stderr
    report = json.loads((small / "rep" / "report.json").read_text())
    assert not (small / "rep" / "report.txt").exists()
    assert report["schema"] == "avcons.report/v1"
    assert json.dumps(report).count("CCFD") > 0


def test_missing_embeddings_file_is_io_error(small):
    write_jsonl(small / "m2.jsonl", "avcons.manifest/v1",
                [entry("a", "genuine", {"embeddings": "missing_embeddings.jsonl"})])
    r = run("score", "-m", small / "m2.jsonl", "--systems", "scfd", "-o", small / "s.jsonl")
    assert r.returncode == 3
    assert "missing_embeddings.jsonl" in r.stderr


def test_missing_manifest_is_io_error(tmp_path):
    r = run("score", "-m", tmp_path / "nope.jsonl", "-o", tmp_path / "s.jsonl")
    assert r.returncode == 3


def test_single_class_manifest_exits_2(small):
    write_jsonl(small / "m3.jsonl", "avcons.manifest/v1", [
        entry("a", "genuine", {"transcripts": "t.jsonl"}),
        entry("b", "genuine", {"transcripts": "t.jsonl"}),
    ])
    run("score", "-m", small / "m3.jsonl", "--systems", "ccfd", "-o", small / "s.jsonl")
    r = run("evaluate", "-s", small / "s.jsonl", "-m", small / "m3.jsonl", "-r", small / "rep")
    assert r.returncode == 2
    assert "genuine" in r.stderr


def test_malformed_manifest_exits_2(tmp_path):
    (tmp_path / "m.jsonl").write_text('{"schema":"avcons.manifest/v1"}\n{"video_id": \n')
    r = run("score", "-m", tmp_path / "m.jsonl", "-o", tmp_path / "s.jsonl")
    assert r.returncode == 2
    assert ":2:" in r.stderr


def test_nothing_fusible_exits_2(small):
    run("score", "-m", small / "m.jsonl", "--systems", "ccfd", "-o", small / "s.jsonl")
    r = run("fuse", "-s", small / "s.jsonl", "-o", small / "f.jsonl")
    assert r.returncode == 2


def test_bad_flags_exit_2(small):
    assert run("score", "-m", small / "m.jsonl", "-o", small / "s.jsonl", "--strict", "--lax").returncode == 2
    assert run("score", "-m", small / "m.jsonl", "-o", small / "s.jsonl", "--systems", "xcfd").returncode == 2
    assert run("fuse", "-s", small / "m.jsonl", "-o", small / "f.jsonl", "--norm-population", "x").returncode == 2
    assert run("bogus").returncode == 2


def test_lax_accepts_unknown_keys(small):
    write_jsonl(small / "m4.jsonl", "avcons.manifest/v1",
                [entry("b", "genuine", {"transcripts": "t.jsonl"}, comment="extra")])
    assert run("score", "-m", small / "m4.jsonl", "--systems", "ccfd", "-o", small / "s.jsonl").returncode == 2
    r = run("score", "-m", small / "m4.jsonl", "--systems", "ccfd", "-o", small / "s.jsonl", "--lax")
    assert r.returncode == 0
    assert "comment" in r.stderr


def test_grid_command():
    r = run("grid")
    assert r.returncode == 0
    lines = r.stdout.splitlines()
    assert lines[1].split() == ["blur", "sigma", "0.1", "2", "5"]
    assert lines[4].split() == ["compression", "CRF", "33", "40", "47"]


def pipeline(workdir, env=None, report_dir=True):
    manifest = FIXTURE / "manifest.jsonl"
    assert run("score", "-m", manifest, "-o", workdir / "scores.jsonl").returncode == 0
    assert run("fuse", "-s", workdir / "scores.jsonl", "-o", workdir / "fused.jsonl").returncode == 0
    args = ["evaluate", "-s", workdir / "fused.jsonl", "-m", manifest, "--format", "both"]
    if report_dir:
        args += ["-r", workdir / "report"]
    r = run(*args, env=env, cwd=workdir)
    assert r.returncode == 0, r.stderr


def test_end_to_end_fixture_is_reproducible(tmp_path):
    first, second = tmp_path / "one", tmp_path / "two"
    first.mkdir()
    second.mkdir()
    pipeline(first)
    pipeline(second)
    for name in ["scores.jsonl", "fused.jsonl", "report/report.json", "report/report.txt"]:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name

    expected = json.loads((FIXTURE / "expected_auc.json").read_text())
    report = json.loads((first / "report" / "report.json").read_text())
    table = report["generalization"]
    assert table["columns"] == expected["columns"]
    for system, row in expected["rows"].items():
        for column, value in row["cells"].items():
            assert table["rows"][system]["cells"][column] == value


def test_report_dir_from_environment(tmp_path):
    target = tmp_path / "from_env"
    pipeline(tmp_path, env={"AVCONS_REPORT_DIR": str(target)}, report_dir=False)
    assert (target / "report.json").exists()
    assert (target / "report.txt").exists()

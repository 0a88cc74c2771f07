"""Smoke tests for the avcons Python module."""

import json
import math
import os
from pathlib import Path

import pytest

import avcons

SOURCE = Path(os.environ.get("AVCONS_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FIXTURE = SOURCE / "tests" / "fixtures" / "e2e"


def test_content():
    assert avcons.tokenize("the cat, sat.") == ["THE", "CAT", "SAT"]
    r = avcons.align(["A", "B", "C", "D"], ["A", "X", "C"])
    assert (r.substitutions, r.deletions, r.insertions, r.hits, r.errors) == (1, 1, 0, 2, 2)
    assert r.alignment[0] == ("match", 0, 0)
    assert r.alignment[-1] == ("deletion", 3, None)
    assert avcons.word_error_rate(["A", "B", "C", "D"], ["A", "X", "C"]) == 0.5
    assert math.isinf(avcons.word_error_rate([], ["A"]))
    assert [avcons.ccfd_score(w) for w in (0, 0.25, 1.5, math.inf)] == [1.0, 0.75, 0.0, 0.0]
    with pytest.raises(ValueError):
        avcons.ccfd_score(-1.0)


def test_semantic_and_temporal():
    assert avcons.cosine_similarity([1, 0], [0, 1]) == 0.0
    with pytest.raises(avcons.DimensionMismatch):
        avcons.cosine_similarity([1, 0], [1, 0, 0])
    assert avcons.third_percentile([0.9, 0.1, 0.5]) == 0.1
    assert avcons.third_percentile(list(range(1, 101))) == 3
    with pytest.raises(avcons.EmptyInput):
        avcons.third_percentile([])
    frames = [avcons.EmbeddingFrame([1.0, 0.0], [1.0, 0.0]) for _ in range(99)]
    frames.append(avcons.EmbeddingFrame([1.0, 0.0], [-1.0, 0.0]))
    assert avcons.scfd_score(avcons.EmbeddingFrameSeries("v", 2, frames)) == 1.0

    assert avcons.expected_window_count(100) == 96
    assert avcons.expected_window_count(4) == 0
    series = avcons.SyncScoreSeries("v", [0.2, 0.4, 0.6])
    assert avcons.tcfd_score(series) == pytest.approx(0.4)
    with pytest.raises(avcons.SchemaError):
        avcons.check_window_count(series, 10)


def test_fusion_and_evaluation():
    stats = avcons.fit_minmax([0.1, 0.5, 0.9], avcons.System.SCFD, "D")
    assert avcons.apply_minmax(0.5, stats) == pytest.approx(0.5)
    assert avcons.apply_minmax(0.3, avcons.NormalizationStats(avcons.System.TCFD, 0.3, 0.3)) == 0.5
    assert avcons.fuse(0.2, 0.5, 0.8) == pytest.approx(0.5)
    with pytest.raises(avcons.MissingSystem):
        avcons.fuse(0.2, None, 0.8)
    assert avcons.auc([0.9, 0.3], [0.5, 0.1]) == 0.75
    with pytest.raises(avcons.DegenerateLabels):
        avcons.auc([0.9], [])
    mean, std = avcons.aggregate_mean_std([0.9924, 0.9481, 0.7741, 0.7167, 0.9686, 0.9687, 0.9656, 0.9110])
    assert abs(mean - 0.9056) <= 0.0005 and abs(std - 0.0961) <= 0.0005


def test_exception_hierarchy():
    assert issubclass(avcons.UnknownPerturbation, avcons.ValidationError)
    assert issubclass(avcons.ValidationError, avcons.InputError)
    assert issubclass(avcons.InputError, avcons.Error)
    assert issubclass(avcons.IoError, avcons.Error)


def test_perturbation_grid():
    grid = avcons.PerturbationConfig.load(SOURCE / "data" / "perturbation_grid.json")
    assert grid == avcons.PerturbationConfig.defaults()
    assert [(r.kind, r.parameter, list(r.levels)) for r in grid.video_rows] == [
        ("blur", "sigma", [0.1, 2.0, 5.0]),
        ("noise", "std", [0.01, 0.05, 0.1]),
        ("contrast", "factor", [0.8, 1.2, 2.0]),
        ("compression", "CRF", [33.0, 40.0, 47.0]),
    ]
    assert grid.snr_levels_db == [12.5, 2.5, -7.5]
    tag = grid.validated(avcons.PerturbationTag(avcons.Modality.Video, "blur", level=3))
    assert tag.parameter_value == 5.0 and tag.cell_key == "video/blur/L3"
    with pytest.raises(avcons.UnknownPerturbation):
        grid.validated(avcons.PerturbationTag(avcons.Modality.Video, "blur", level=4))


def test_adapter_round_trip(tmp_path):
    entry = avcons.ManifestEntry()
    entry.video_id = "clip"
    entry.label = avcons.Label.Fake
    entry.dataset = "D"
    entry.deepfake_mode = avcons.DeepfakeMode.FVRA
    entry.technique = avcons.Technique.WL
    entry.frame_count = 100
    entry.perturbation = avcons.PerturbationTag(avcons.Modality.Audio, "white", snr_db=2.5)
    entry.paths = {
        avcons.FrontendKind.Transcripts: tmp_path / "t.jsonl",
        avcons.FrontendKind.Embeddings: tmp_path / "e.jsonl",
        avcons.FrontendKind.Sync: tmp_path / "s.jsonl",
    }
    meta = {"checkpoint": "base", "layer": "12"}
    avcons.write_manifest(tmp_path / "m.jsonl", [entry])
    avcons.write_transcripts(tmp_path / "t.jsonl", [avcons.TranscriptPair("clip", ["A", "B"], ["A"])])
    frames = [avcons.EmbeddingFrame([1.0, 2.0], [2.0, 1.0])] * 3
    avcons.write_embeddings(tmp_path / "e.jsonl", [avcons.EmbeddingFrameSeries("clip", 2, frames)], meta)
    avcons.write_sync_scores(tmp_path / "s.jsonl", [avcons.SyncScoreSeries("clip", [0.5] * 96)])

    assert avcons.read_header_metadata(tmp_path / "e.jsonl", avcons.EMBEDDINGS_SCHEMA) == meta
    loaded = avcons.load_manifest(tmp_path / "m.jsonl")
    assert loaded == [entry]
    assert loaded[0].subset_key == "D/FVRA/WL"
    out = avcons.load_frontend_outputs(loaded[0])
    assert out.transcripts.reference_tokens == ["A", "B"]
    assert len(out.embeddings.frames) == 3
    assert len(out.sync.scores) == 96


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(avcons.IoError):
        avcons.load_manifest(tmp_path / "absent.jsonl")


def test_pipeline_on_fixture(tmp_path):
    assert avcons.score(FIXTURE / "manifest.jsonl", tmp_path / "scores.jsonl", threads=2) == 40
    fused, skipped = avcons.fuse_scores(tmp_path / "scores.jsonl", tmp_path / "fused.jsonl")
    assert (fused, skipped) == (40, 0)
    report = avcons.evaluate(tmp_path / "fused.jsonl", FIXTURE / "manifest.jsonl", tmp_path / "report")
    expected = json.loads((FIXTURE / "expected_auc.json").read_text())
    assert report["generalization"]["columns"] == expected["columns"]
    for system, row in expected["rows"].items():
        assert report["generalization"]["rows"][system]["cells"] == row["cells"]
    assert (tmp_path / "report" / "report.txt").exists()

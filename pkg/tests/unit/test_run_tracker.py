import json
from pathlib import Path
from types import SimpleNamespace

from dilma.tracking import RunTracker, hash_file, manifest_path, run_tracker


def test_manifest_written_next_to_artifact(tmp_path: Path):
    source = tmp_path / "train.jsonl"
    source.write_text('{"text": "a", "label": 0}\n', encoding="utf-8")
    artifact = tmp_path / "report.json"
    artifact.write_text("{}\n", encoding="utf-8")

    tracker = RunTracker("evaluate", seed=4, config_hash="abc")
    tracker.record_input(source)
    written = tracker.artifact_written(artifact, nad=0.5)

    assert written == manifest_path(artifact) == tmp_path / "report.json.manifest.json"
    manifest = json.loads(written.read_text(encoding="utf-8"))
    assert manifest["subcommand"] == "evaluate"
    assert manifest["inputs"] == {str(source): hash_file(source)}
    assert manifest["output_hash"] == hash_file(artifact)
    assert manifest["seed"] == 4
    assert manifest["nad"] == 0.5
    assert manifest["wall_time_seconds"] >= 0


def test_hash_file_is_content_based(tmp_path: Path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_bytes(b"same")
    b.write_bytes(b"same")
    assert hash_file(a) == hash_file(b)


def test_wall_time_counts_from_construction(tmp_path: Path, monkeypatch):
    clock = iter([10.0, 12.5])
    monkeypatch.setattr(run_tracker, "time", SimpleNamespace(perf_counter=lambda: next(clock)))
    artifact = tmp_path / "mlm.pt"
    artifact.write_bytes(b"weights")

    tracker = RunTracker("pretrain", seed=0, config_hash="abc")
    manifest = json.loads(tracker.artifact_written(artifact).read_text(encoding="utf-8"))

    assert manifest["wall_time_seconds"] == 2.5

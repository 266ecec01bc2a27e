import json
import sys
from pathlib import Path

import pytest

from dilma.classifiers import ClassifierConfig, LSTMClassifier
from dilma.cli.main import build_parser, main
from dilma.cli.workspace import Workspace
from dilma.config import RunConfig
from dilma.config.generate_run_config import main as generate_main

SMALL_DATA = ["synthetic_train_size=40", "synthetic_test_size=10", "synthetic_vocab_size=12"]


def settings(tmp_path: Path) -> list[str]:
    return [f"output_dir={tmp_path}", *SMALL_DATA]


def cli_args(tmp_path: Path, *command: str) -> list[str]:
    args: list[str] = []
    for item in settings(tmp_path):
        args += ["--set", item]
    return [*args, *command]


def error_line(capsys: pytest.CaptureFixture[str]) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


@pytest.fixture
def workspace(tmp_path: Path) -> Workspace:
    ws = Workspace(RunConfig.from_sources(overrides=settings(tmp_path), environ={}))
    ws.data()
    return ws


def test_attack_without_substitute(workspace, tmp_path, capsys):
    code = main(cli_args(tmp_path, "attack"))
    payload = error_line(capsys)
    assert code != 0
    assert payload["errorId"] == "missing_artifact"
    assert "run train-substitute first" in payload["debugMessage"]


def test_attack_without_any_artifact(tmp_path, capsys):
    assert main(cli_args(tmp_path, "attack")) != 0
    assert "run pretrain first" in error_line(capsys)["debugMessage"]


def test_evaluate_empty_attack_file(workspace, tmp_path, capsys):
    train, _ = workspace.data()
    config = ClassifierConfig.substitute_defaults(embedding_dim=4, hidden=4)
    workspace.save_classifier(workspace.target_file, LSTMClassifier(train.vocab.size, 2, config), train.vocab, trained_on="target_half")
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")

    code = main(cli_args(tmp_path, "evaluate", "--attack-file", str(empty)))
    payload = error_line(capsys)
    assert code == 1
    assert payload["errorId"] == "no_results"
    assert "no results" in payload["debugMessage"]


def test_unknown_setting_exits_with_config_code(tmp_path, capsys):
    code = main(["--set", "attack_q=1", "--set", f"output_dir={tmp_path}", "pretrain"])
    payload = error_line(capsys)
    assert code == 2
    assert payload["errorId"] == "invalid_config"


def test_run_directory_holds_resolved_config(workspace):
    assert RunConfig.from_sources(workspace.config_file, environ={}) == workspace.config
    assert workspace.vocab_file.exists()


def test_parser_knows_every_subcommand():
    parser = build_parser()
    for name in ("pretrain", "train-target", "train-substitute", "train-deeplev", "attack", "evaluate", "defend", "detect"):
        assert parser.parse_args([name]).command == name
    args = parser.parse_args(["evaluate", "--tags", "pos", "a.tags", "b.tags", "--variant", "dilma"])
    assert args.tags == [["pos", "a.tags", "b.tags"]]
    with pytest.raises(SystemExit):
        parser.parse_args(["attack", "--variant", "other"])


def test_generate_run_config(tmp_path, monkeypatch):
    out = tmp_path / "run.env.example"
    monkeypatch.setattr(sys, "argv", ["generate-run-config", "-o", str(out)])
    generate_main()
    assert RunConfig.from_sources(out, environ={}) == RunConfig.from_sources(environ={})

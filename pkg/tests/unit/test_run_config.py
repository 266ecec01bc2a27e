from pathlib import Path

import pytest

from dilma.attack import AttackVariant
from dilma.config import RunConfig, RunConfigError, generate_run_config_example
from dilma.errors import DilmaErrorCodes


def test_defaults_without_sources():
    config = RunConfig.from_sources(environ={})
    assert config.seed == 0
    assert config.attack_k == 8
    assert config.uses_synthetic_data


def test_precedence_file_then_environment_then_overrides(tmp_path: Path):
    path = tmp_path / "run.env"
    path.write_text("SEED=3\nATTACK_K=4\nattack_m=2\n", encoding="utf-8")
    config = RunConfig.from_sources(path, ["attack_m=7"], environ={"DILMA_ATTACK_K": "6", "OTHER": "x"})
    assert (config.seed, config.attack_k, config.attack_m) == (3, 6, 7)


def test_unknown_key_is_named():
    with pytest.raises(RunConfigError, match="ATTACK_Q") as info:
        RunConfig.from_sources(overrides=["ATTACK_Q=1"], environ={})
    assert info.value.error_id == DilmaErrorCodes.INVALID_CONFIG


def test_invalid_value():
    with pytest.raises(RunConfigError, match="ATTACK_K"):
        RunConfig.from_sources(overrides=["attack_k=0"], environ={})


def test_override_without_equals_sign():
    with pytest.raises(RunConfigError):
        RunConfig.from_sources(overrides=["seed"], environ={})


def test_resolved_text_reloads_identically(tmp_path: Path):
    config = RunConfig.from_sources(
        overrides=["attack_variant=dilma", "attack_tau=0.25", "train_path=data/train.jsonl"], environ={}
    )
    path = tmp_path / "resolved.env"
    path.write_text(config.to_env_text(), encoding="utf-8")
    assert RunConfig.from_sources(path, environ={}) == config


def test_hash_ignores_execution_settings():
    base = RunConfig.from_sources(environ={})
    moved = RunConfig.from_sources(overrides=["output_dir=/tmp/elsewhere", "attack_workers=4"], environ={})
    assert base.config_hash() == moved.config_hash()
    assert base.config_hash() != RunConfig.from_sources(overrides=["seed=1"], environ={}).config_hash()


def test_run_directory_is_named_by_hash():
    config = RunConfig.from_sources(environ={})
    assert config.run_dir().name == f"run-{config.config_hash()[:12]}"


def test_dilma_variant_has_no_distance_weight():
    config = RunConfig.from_sources(overrides=["attack_beta=2.0"], environ={})
    assert config.attack_config(AttackVariant.DILMA).beta == 0.0
    assert config.attack_config().beta == 2.0


def test_str_lists_every_setting():
    text = str(RunConfig.from_sources(environ={}))
    assert "RunConfig(" in text
    assert "attack_parameter_subset=last_layers" in text


def test_example_file_documents_every_field():
    example = generate_run_config_example()
    for name, field in RunConfig.model_fields.items():
        assert f"{name.upper()}=" in example
        assert f"# {field.description}" in example

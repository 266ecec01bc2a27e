import hashlib
import os
from collections.abc import Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Literal, Self, override

from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator

from dilma.attack import AttackConfig, AttackVariant, SearchSpace
from dilma.classifiers import Architecture, ClassifierConfig
from dilma.deeplev import DeepLevConfig
from dilma.defense import DiscriminatorConfig
from dilma.errors import DilmaError, DilmaErrorCodes
from dilma.lm import MLMConfig, ParameterSubset
from dilma.textcore import SyntheticSettings

ENV_PREFIX = "DILMA_"

# Execution settings that never change results; left out of the config hash.
_UNHASHED_FIELDS = frozenset({"output_dir", "attack_workers"})


class RunConfigError(DilmaError):
    """Raised for unknown or invalid run configuration keys."""

    def __init__(self, variable_name: str, reason: str = "is not a known setting") -> None:
        super().__init__({
            "errorId": DilmaErrorCodes.INVALID_CONFIG,
            "exitCode": 2,
            "debugMessage": f"Configuration variable '{variable_name}' {reason}.",
        })


def render_value(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _parse_override(item: str) -> tuple[str, str]:
    key, sep, value = item.partition("=")
    if not sep or not key.strip():
        raise RunConfigError(item, "is not of the form key=value")
    return key.strip(), value.strip()


class AbstractRunConfig(BaseModel):
    """
    Flat key=value configuration.

    Values resolve from field defaults, then a dotenv-style file, then DILMA_-prefixed
    environment variables, then command-line overrides. Keys are field names in any case.
    """

    @classmethod
    def from_sources(
        cls,
        path: Path | None = None,
        overrides: Sequence[str] = (),
        environ: Mapping[str, str] | None = None,
    ) -> Self:
        raw: dict[str, str] = {}
        if path is not None:
            if not path.exists():
                raise DilmaError({
                    "errorId": DilmaErrorCodes.MISSING_ARTIFACT,
                    "debugMessage": f"config file {path} does not exist",
                })
            raw.update({k: v or "" for k, v in dotenv_values(path).items()})
        environ = os.environ if environ is None else environ
        raw.update({k.removeprefix(ENV_PREFIX): v for k, v in environ.items() if k.startswith(ENV_PREFIX)})
        raw.update(_parse_override(item) for item in overrides)
        return cls.from_values(raw)

    @classmethod
    def from_values(cls, raw: Mapping[str, str]) -> Self:
        values: dict[str, str] = {}
        for key, value in raw.items():
            name = key.lower()
            if name not in cls.model_fields:
                raise RunConfigError(key)
            values[name] = value
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            first = e.errors()[0]
            raise RunConfigError(str(first["loc"][0]).upper(), f"is invalid: {first['msg']}") from e

    def to_env_text(self, *, exclude: frozenset[str] = frozenset()) -> str:
        return "".join(
            f"{name.upper()}={render_value(getattr(self, name))}\n" for name in type(self).model_fields if name not in exclude
        )

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_env_text(exclude=_UNHASHED_FIELDS).encode("utf-8")).hexdigest()

    @override
    def __str__(self) -> str:
        raise NotImplementedError("Subclasses must implement __str__.")


class RunConfig(AbstractRunConfig):
    seed: int = Field(default=0, description="Seed for data generation, training and attacks")

    train_path: Path | None = Field(default=None, description="JSON-lines training data; empty for synthetic data")
    test_path: Path | None = Field(default=None, description="JSON-lines test data; empty for synthetic data")
    synthetic_train_size: int = Field(default=2_000, ge=2, description="Synthetic training sentences")
    synthetic_test_size: int = Field(default=400, ge=1, description="Synthetic test sentences")
    synthetic_vocab_size: int = Field(default=100, ge=4, description="Synthetic regular words")
    synthetic_num_classes: int = Field(default=2, ge=2, description="Synthetic classes")
    target_trains_on: Literal["target_half", "full"] = Field(
        default="target_half", description="Training data of the target: its half of the split or all of it"
    )

    mlm_num_layers: int = Field(default=2, ge=1, description="MLM encoder layers")
    mlm_width: int = Field(default=128, ge=1, description="MLM model width")
    mlm_heads: int = Field(default=4, ge=1, description="MLM attention heads")
    mlm_ff_width: int = Field(default=256, ge=1, description="MLM feed-forward width")
    mlm_max_length: int = Field(default=64, ge=1, description="Maximum sequence length for every model")
    mlm_epochs: int = Field(default=10, ge=0, description="MLM pretraining epochs")
    mlm_batch_size: int = Field(default=32, ge=1, description="MLM batch size")
    mlm_learning_rate: float = Field(default=1e-3, gt=0.0, description="MLM AdamW learning rate")

    target_architecture: Architecture = Field(default=Architecture.TRANSFORMER, description="Target encoder family")
    target_embedding_dim: int = Field(default=128, ge=1, description="Target embedding width")
    target_epochs: int = Field(default=5, ge=1, description="Target training epochs")
    target_batch_size: int = Field(default=32, ge=1, description="Target batch size")
    target_learning_rate: float = Field(default=1e-3, gt=0.0, description="Target Adam learning rate")

    substitute_architecture: Architecture = Field(default=Architecture.LSTM, description="Substitute encoder family")
    substitute_hidden: int = Field(default=150, ge=1, description="Substitute LSTM width")
    substitute_dropout: float = Field(default=0.3, ge=0.0, lt=1.0, description="Substitute dropout")
    substitute_epochs: int = Field(default=5, ge=1, description="Substitute training epochs")
    substitute_batch_size: int = Field(default=32, ge=1, description="Substitute batch size")
    substitute_learning_rate: float = Field(default=1e-3, gt=0.0, description="Substitute Adam learning rate")

    deeplev_n_pairs: int = Field(default=50_000, ge=1, description="Generated Deep Levenshtein training pairs")
    deeplev_max_edits: int = Field(default=5, ge=0, description="Random edits per pair, uniform on 0..max")
    deeplev_epochs: int = Field(default=8, ge=1, description="Deep Levenshtein training epochs")
    deeplev_batch_size: int = Field(default=128, ge=1, description="Deep Levenshtein batch size")
    deeplev_learning_rate: float = Field(default=2e-3, gt=0.0, description="Deep Levenshtein Adam learning rate")

    attack_variant: AttackVariant = Field(default=AttackVariant.DILMA_DL, description="sampling_fool, dilma or dilma_dl")
    attack_beta: float = Field(default=1.0, ge=0.0, description="Distance term weight (forced to 0 for dilma)")
    attack_tau: float = Field(default=1.0, gt=0.0, description="Sampling temperature")
    attack_k: int = Field(default=8, ge=1, description="Attack iterations")
    attack_m: int = Field(default=5, ge=1, description="Samples per attack iteration")
    attack_learning_rate: float = Field(default=1e-3, ge=0.0, description="Attack gradient step size")
    attack_parameter_subset: ParameterSubset = Field(
        default=ParameterSubset.LAST_LAYERS, description="MLM parameters updated by the attack"
    )
    attack_examples: int = Field(default=200, ge=1, description="Test examples to attack")

    tune_budget: int = Field(default=10, ge=1, description="Random-search trials for attack --tune")
    tune_validation_size: int = Field(default=50, ge=1, description="Substitute-half examples used for tuning")

    detection_size: int = Field(default=2_000, ge=6, description="Detection set size before clamping")
    discriminator_max_epochs: int = Field(default=50, ge=1, le=50, description="Discriminator epoch cap")
    discriminator_patience: int = Field(default=5, ge=1, description="Discriminator early-stopping patience")

    output_dir: Path = Field(default=Path("runs"), description="Parent directory of run directories")
    attack_workers: int = Field(default=1, ge=1, description="Threads attacking examples concurrently")

    @field_validator("train_path", "test_path", mode="before")
    @classmethod
    def _empty_is_none(cls, value: object) -> object:
        return None if value == "" else value

    @property
    def uses_synthetic_data(self) -> bool:
        return self.train_path is None

    def run_dir(self) -> Path:
        return self.output_dir / f"run-{self.config_hash()[:12]}"

    def synthetic_settings(self) -> SyntheticSettings:
        """Train and test are generated together and split afterwards."""
        return SyntheticSettings(
            n=self.synthetic_train_size + self.synthetic_test_size,
            vocab_size=self.synthetic_vocab_size,
            num_classes=self.synthetic_num_classes,
            seed=self.seed,
        )

    def mlm_config(self) -> MLMConfig:
        return MLMConfig(
            num_layers=self.mlm_num_layers,
            width=self.mlm_width,
            heads=self.mlm_heads,
            ff_width=self.mlm_ff_width,
            max_length=self.mlm_max_length,
            epochs=self.mlm_epochs,
            batch_size=self.mlm_batch_size,
            learning_rate=self.mlm_learning_rate,
        )

    def target_config(self) -> ClassifierConfig:
        return ClassifierConfig.target_defaults(
            architecture=self.target_architecture,
            embedding_dim=self.target_embedding_dim,
            max_length=self.mlm_max_length,
            epochs=self.target_epochs,
            batch_size=self.target_batch_size,
            learning_rate=self.target_learning_rate,
        )

    def substitute_config(self) -> ClassifierConfig:
        return ClassifierConfig.substitute_defaults(
            architecture=self.substitute_architecture,
            hidden=self.substitute_hidden,
            dropout=self.substitute_dropout,
            max_length=self.mlm_max_length,
            epochs=self.substitute_epochs,
            batch_size=self.substitute_batch_size,
            learning_rate=self.substitute_learning_rate,
        )

    def deeplev_config(self) -> DeepLevConfig:
        return DeepLevConfig(
            n_pairs=self.deeplev_n_pairs,
            max_edits=self.deeplev_max_edits,
            epochs=self.deeplev_epochs,
            batch_size=self.deeplev_batch_size,
            learning_rate=self.deeplev_learning_rate,
        )

    def attack_config(self, variant: AttackVariant | None = None) -> AttackConfig:
        return AttackConfig(
            variant=variant or self.attack_variant,
            beta=self.attack_beta,
            tau=self.attack_tau,
            k=self.attack_k,
            m=self.attack_m,
            learning_rate=self.attack_learning_rate,
            parameter_subset=self.attack_parameter_subset,
            seed=self.seed,
        )

    def search_space(self, variant: AttackVariant | None = None) -> SearchSpace:
        return SearchSpace(variant=variant or self.attack_variant, parameter_subset=self.attack_parameter_subset)

    def discriminator_config(self) -> DiscriminatorConfig:
        return DiscriminatorConfig(
            max_epochs=self.discriminator_max_epochs,
            patience=self.discriminator_patience,
            max_length=self.mlm_max_length,
        )

    @override
    def __str__(self) -> str:
        body = "".join(f"            {name}={render_value(getattr(self, name))},\n" for name in type(self).model_fields)
        return f"""
        RunConfig(
{body}        )
        """

"""Desk-scale end-to-end runs.

Two kinds of fixtures: tiny runs driven through the CLI, and desk-scale models
trained directly on the synthetic marker corpus. Both are built once per
session; modules mark themselves ``integration`` so the suite can be
deselected with ``-m "not integration"``.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from dilma.classifiers import Classifier, ClassifierConfig, train_substitute, train_target
from dilma.cli.main import main
from dilma.deeplev import DeepLevConfig, DeepLevenshtein, generate_pairs, train_deeplev
from dilma.lm import MaskedLanguageModel, MLMConfig, pretrain_mlm
from dilma.textcore import (
    DatasetSplit,
    LabeledExample,
    SyntheticSettings,
    TokenSequence,
    Vocabulary,
    generate_from_settings,
    split_for_substitute,
    synthetic_vocabulary,
)

TINY_RUN = [
    "synthetic_train_size=160",
    "synthetic_test_size=40",
    "synthetic_vocab_size=20",
    "mlm_num_layers=1",
    "mlm_width=16",
    "mlm_heads=2",
    "mlm_ff_width=32",
    "mlm_epochs=1",
    "mlm_batch_size=16",
    "target_embedding_dim=16",
    "target_epochs=1",
    "target_batch_size=16",
    "substitute_hidden=8",
    "substitute_epochs=1",
    "substitute_batch_size=16",
    "deeplev_n_pairs=1000",
    "deeplev_epochs=1",
    "attack_k=2",
    "attack_m=2",
    "attack_examples=10",
    "detection_size=8",
    "discriminator_max_epochs=2",
]

TRAINING_STEPS = (["pretrain"], ["train-target"], ["train-substitute"], ["train-deeplev"])


class TinyCli:
    """Runs subcommands with the tiny settings against one output directory at a time."""

    def __call__(self, output_dir: Path, *command: str) -> int:
        args: list[str] = []
        for item in [*TINY_RUN, f"output_dir={output_dir}"]:
            args += ["--set", item]
        return main([*args, *command])

    def train(self, output_dir: Path) -> None:
        for step in TRAINING_STEPS:
            assert self(output_dir, *step) == 0, step

    @staticmethod
    def run_directory(output_dir: Path) -> Path:
        (directory,) = output_dir.glob("run-*")
        return directory


@pytest.fixture(scope="session")
def trained_output(tmp_path_factory: pytest.TempPathFactory) -> Path:
    output_dir = tmp_path_factory.mktemp("trained")
    TinyCli().train(output_dir)
    return output_dir


@pytest.fixture
def cli() -> TinyCli:
    return TinyCli()


DESK_VOCAB = 100
DESK_TRAIN = 2_000
DESK_TEST = 400
DESK_SEED = 0


@dataclass(frozen=True, slots=True)
class DeskData:
    """Synthetic marker corpus at the size the acceptance runs use."""

    settings: SyntheticSettings
    train: list[LabeledExample]
    test: list[LabeledExample]
    split: DatasetSplit
    vocab: Vocabulary

    def sequences(self, examples: list[LabeledExample]) -> list[TokenSequence]:
        return [example.sequence for example in examples]


@pytest.fixture(scope="session")
def desk() -> DeskData:
    settings = SyntheticSettings(n=DESK_TRAIN + DESK_TEST, vocab_size=DESK_VOCAB, num_classes=2, seed=DESK_SEED)
    examples = generate_from_settings(settings)
    train, test = examples[:DESK_TRAIN], examples[DESK_TRAIN:]
    return DeskData(
        settings=settings,
        train=train,
        test=test,
        split=split_for_substitute(train, DESK_SEED),
        vocab=synthetic_vocabulary(DESK_VOCAB),
    )


@pytest.fixture(scope="session")
def desk_mlm(desk: DeskData) -> MaskedLanguageModel:
    return pretrain_mlm(desk.sequences(desk.train), desk.vocab, MLMConfig(), DESK_SEED)


@pytest.fixture(scope="session")
def desk_target(desk: DeskData) -> Classifier:
    config = ClassifierConfig.target_defaults(epochs=10)
    return train_target(desk.split.target_half, desk.vocab.size, 2, config, DESK_SEED)


@pytest.fixture(scope="session")
def desk_substitute(desk: DeskData) -> Classifier:
    config = ClassifierConfig.substitute_defaults(epochs=10)
    return train_substitute(desk.split, desk.vocab.size, 2, config, DESK_SEED)


@pytest.fixture(scope="session")
def desk_deeplev(desk: DeskData) -> DeepLevenshtein:
    config = DeepLevConfig()
    pool = list(desk.vocab.regular_ids)
    pairs = generate_pairs(desk.sequences(desk.train), config.n_pairs, np.random.default_rng(DESK_SEED), pool)
    return train_deeplev(pairs, desk.vocab.size, config, DESK_SEED)

"""Adversarial-example detection.

A recurrent binary discriminator learns to tell original sentences from
adversarial ones; its ROC AUC on a test slice, kept away from training and
early stopping, says how detectable an attack is.
"""

import copy
import json
from collections.abc import Sequence
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from pydantic import BaseModel, Field

from dilma.classifiers import Architecture, ClassifierConfig, LSTMClassifier, predict_proba_batch
from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.layers import pad_sequences, truncate_sequences
from dilma.logger import get_logger
from dilma.textcore import TokenSequence
from dilma.training import EarlyStopping, batch_indices

from .roc import roc_auc

logger = get_logger(__name__)

VALIDATION_SHARE = 0.1
TEST_SHARE = 0.2
MIN_DETECTION_SIZE = 6


class DetectionLabel(IntEnum):
    ORIGINAL = 0
    ADVERSARIAL = 1


@dataclass(frozen=True, slots=True)
class DetectionExample:
    sequence: TokenSequence
    label: DetectionLabel


@dataclass(frozen=True, slots=True)
class DetectionSet:
    train: list[DetectionExample]
    validation: list[DetectionExample]
    test: list[DetectionExample]

    @property
    def examples(self) -> list[DetectionExample]:
        return [*self.train, *self.validation, *self.test]


def _unique(sequences: Sequence[TokenSequence]) -> list[TokenSequence]:
    return list(dict.fromkeys(sequences))


def build_detection_set(
    originals: Sequence[TokenSequence],
    adversarials: Sequence[TokenSequence],
    n: int,
    rng: np.random.Generator,
) -> DetectionSet:
    """
    Balanced, shuffled and deduplicated detection set of size n.

    A sequence present on both sides is dropped from both. Each side holds out a
    tenth for validation and a fifth for testing, at least one example each. The
    test slice is never seen while training or early stopping.
    """
    if n < MIN_DETECTION_SIZE:
        raise dilma_error(
            DilmaErrorCodes.INVALID_INPUT,
            f"a detection set needs at least {MIN_DETECTION_SIZE} examples, got {n}",
        )
    shared = set(originals) & set(adversarials)
    pools = {
        DetectionLabel.ORIGINAL: [s for s in _unique(originals) if s not in shared],
        DetectionLabel.ADVERSARIAL: [s for s in _unique(adversarials) if s not in shared],
    }
    wanted = {DetectionLabel.ORIGINAL: n - n // 2, DetectionLabel.ADVERSARIAL: n // 2}

    train: list[DetectionExample] = []
    validation: list[DetectionExample] = []
    test: list[DetectionExample] = []
    for label, pool in pools.items():
        if len(pool) < wanted[label]:
            raise dilma_error(
                DilmaErrorCodes.INSUFFICIENT_DATA,
                f"{len(pool)} usable {label.name.lower()} sequences, {wanted[label]} needed",
            )
        chosen = [DetectionExample(pool[i], label) for i in rng.permutation(len(pool))[: wanted[label]]]
        n_test = max(1, int(len(chosen) * TEST_SHARE))
        n_validation = max(1, int(len(chosen) * VALIDATION_SHARE))
        test.extend(chosen[:n_test])
        validation.extend(chosen[n_test : n_test + n_validation])
        train.extend(chosen[n_test + n_validation :])

    return DetectionSet(
        train=[train[i] for i in rng.permutation(len(train))],
        validation=[validation[i] for i in rng.permutation(len(validation))],
        test=[test[i] for i in rng.permutation(len(test))],
    )


class DiscriminatorConfig(BaseModel):
    embedding_dim: int = Field(default=64, ge=1)
    hidden: int = Field(default=64, ge=1)
    dropout: float = Field(default=0.3, ge=0.0, lt=1.0)
    max_length: int = Field(default=64, ge=1)
    max_epochs: int = Field(default=50, ge=1, le=50)
    patience: int = Field(default=5, ge=1, description="Epochs without validation improvement before stopping")
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)

    def classifier_config(self) -> ClassifierConfig:
        return ClassifierConfig(
            architecture=Architecture.LSTM,
            embedding_dim=self.embedding_dim,
            hidden=self.hidden,
            dropout=self.dropout,
            max_length=self.max_length,
            epochs=self.max_epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
        )


def _check_labels(examples: Sequence[DetectionExample], what: str) -> None:
    if len({example.label for example in examples}) < 2:
        raise dilma_error(DilmaErrorCodes.INSUFFICIENT_DATA, f"{what} holds a single label")


def _batch_tensors(examples: Sequence[DetectionExample], max_length: int) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    ids, padding_mask = pad_sequences(truncate_sequences([e.sequence for e in examples], max_length))
    return ids, padding_mask, torch.tensor([int(e.label) for e in examples], dtype=torch.long)


def _nll(model: LSTMClassifier, ids: torch.Tensor, padding_mask: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    return F.nll_loss(F.log_softmax(model(ids, padding_mask), dim=-1), labels)


def train_discriminator(
    detection_set: DetectionSet, config: DiscriminatorConfig, seed: int, *, vocab_size: int
) -> LSTMClassifier:
    """LSTM discriminator, NLL loss, early-stopped on validation loss; the best epoch's weights are kept."""
    _check_labels(detection_set.train, "detection training slice")
    _check_labels(detection_set.validation, "detection validation slice")

    torch.manual_seed(seed)
    model = LSTMClassifier(vocab_size, len(DetectionLabel), config.classifier_config())
    generator = torch.Generator().manual_seed(seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    val_ids, val_mask, val_labels = _batch_tensors(detection_set.validation, config.max_length)
    stopper = EarlyStopping(patience=config.patience)
    best_state = copy.deepcopy(model.state_dict())

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        for batch in batch_indices(len(detection_set.train), config.batch_size, generator):
            loss = _nll(model, *_batch_tensors([detection_set.train[i] for i in batch], config.max_length))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

        model.eval()
        with torch.no_grad():
            val_loss = _nll(model, val_ids, val_mask, val_labels).item()
        model.epoch_losses.append(val_loss)
        stop = stopper.step(epoch, val_loss)
        if stopper.best_epoch == epoch:
            best_state = copy.deepcopy(model.state_dict())
        logger.info("epoch finished", model="discriminator", epoch=epoch, validation_loss=round(val_loss, 4))
        if stop:
            logger.info("early stopping", best_epoch=stopper.best_epoch, epoch=epoch)
            break

    model.load_state_dict(best_state)
    model.eval()
    return model


def score_detection(discriminator: LSTMClassifier, sequences: Sequence[TokenSequence]) -> np.ndarray:
    """Probability of the adversarial class for each sequence."""
    return predict_proba_batch(discriminator, sequences)[:, int(DetectionLabel.ADVERSARIAL)]


def detection_roc_auc(discriminator: LSTMClassifier, examples: Sequence[DetectionExample]) -> float:
    scores = score_detection(discriminator, [e.sequence for e in examples])
    return roc_auc(scores, [int(e.label) for e in examples])


class DetectionReport(BaseModel):
    roc_auc: float = Field(ge=0.0, le=1.0)
    n: int = Field(ge=1, description="Detection set size")
    attack_name: str
    validation_size: int = Field(ge=2)
    test_size: int = Field(ge=2, description="Held-out slice the ROC AUC is computed on")
    epochs_run: int = Field(ge=1)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"

    def write(self, path: Path) -> None:
        path.write_text(self.to_json(), encoding="utf-8")

from collections.abc import Sequence
from typing import Protocol

import numpy as np
import torch
import torch.nn.functional as F

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.layers import pad_sequences, truncate_sequences
from dilma.logger import get_logger
from dilma.textcore import LabeledExample
from dilma.training import batch_indices, require_one_batch

from .models import Classifier, ClassifierConfig, build_classifier
from .scoring import predict_proba_batch

logger = get_logger(__name__)


class SubstituteSource(Protocol):
    """The attacker's share of the data: only the substitute half is ever read."""

    @property
    def substitute_half(self) -> list[LabeledExample]: ...


def _check_classes(data: Sequence[LabeledExample], num_classes: int) -> None:
    present = {example.label for example in data}
    if len(present) < 2:
        raise dilma_error(DilmaErrorCodes.INSUFFICIENT_DATA, "classifier training needs at least 2 classes; got single-class data")
    if max(present) >= num_classes:
        raise dilma_error(DilmaErrorCodes.UNKNOWN_LABEL, f"label {max(present)} not below num_classes={num_classes}")


def fit_classifier(
    data: Sequence[LabeledExample],
    vocab_size: int,
    num_classes: int,
    config: ClassifierConfig,
    seed: int,
    *,
    name: str,
) -> Classifier:
    """Cross-entropy training shared by target, substitute and retrained models."""
    _check_classes(data, num_classes)
    require_one_batch(len(data), config.batch_size, f"{name} training data")

    torch.manual_seed(seed)
    model = build_classifier(vocab_size, num_classes, config)
    generator = torch.Generator().manual_seed(seed)
    sequences = truncate_sequences([example.sequence for example in data], config.max_length)
    labels = torch.tensor([example.label for example in data], dtype=torch.long)

    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    model.train()
    for epoch in range(config.epochs):
        total, batches = 0.0, 0
        for batch in batch_indices(len(sequences), config.batch_size, generator):
            ids, padding_mask = pad_sequences([sequences[i] for i in batch])
            loss = F.cross_entropy(model(ids, padding_mask), labels[batch])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item()
            batches += 1
        model.epoch_losses.append(total / batches)
        logger.info("epoch finished", model=name, epoch=epoch + 1, loss=round(total / batches, 4))

    model.eval()
    return model


def train_target(
    data: Sequence[LabeledExample], vocab_size: int, num_classes: int, config: ClassifierConfig, seed: int
) -> Classifier:
    return fit_classifier(data, vocab_size, num_classes, config, seed, name="target")


def train_substitute(
    split: SubstituteSource, vocab_size: int, num_classes: int, config: ClassifierConfig, seed: int
) -> Classifier:
    return fit_classifier(split.substitute_half, vocab_size, num_classes, config, seed, name="substitute")


def accuracy(clf: Classifier, data: Sequence[LabeledExample]) -> float:
    probs = predict_proba_batch(clf, [example.sequence for example in data])
    gold = np.array([example.label for example in data])
    return float((probs.argmax(axis=1) == gold).mean())

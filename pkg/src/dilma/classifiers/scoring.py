from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np
import torch

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.layers import pad_sequences, truncate_sequences
from dilma.sampler import RelaxedSequence
from dilma.textcore import TokenSequence

from .models import Classifier


@dataclass(slots=True)
class ClassifierScores:
    """Class probabilities for one input; differentiable when the input was relaxed."""

    probs: torch.Tensor

    def numpy(self) -> np.ndarray:
        return self.probs.detach().cpu().numpy()

    @property
    def predicted(self) -> int:
        return int(self.probs.argmax())


def predict_proba(clf: Classifier, inputs: TokenSequence | RelaxedSequence) -> ClassifierScores:
    clf.eval()
    if isinstance(inputs, TokenSequence):
        if max(inputs.ids) >= clf.vocab_size:
            raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "token id outside the classifier vocabulary")
        (clipped,) = truncate_sequences([inputs], clf.config.max_length)
        with torch.no_grad():
            logits = clf(clipped.as_tensor().unsqueeze(0))
        return ClassifierScores(probs=torch.softmax(logits, dim=-1)[0])

    rows = inputs.rows
    if rows.dim() != 2 or rows.shape[-1] != clf.vocab_size:
        raise dilma_error(
            DilmaErrorCodes.INVALID_INPUT,
            f"relaxed rows of shape {tuple(rows.shape)} do not match vocabulary size {clf.vocab_size}",
        )
    logits = clf(rows.unsqueeze(0))
    return ClassifierScores(probs=torch.softmax(logits, dim=-1)[0])


def predict_proba_batch(clf: Classifier, sequences: Sequence[TokenSequence], batch_size: int = 256) -> np.ndarray:
    """Probabilities ``(N, C)`` for hard sequences, without gradients.

    Sequences longer than the classifier's `max_length` are scored on their first `max_length` tokens.
    """
    clf.eval()
    sequences = truncate_sequences(sequences, clf.config.max_length)
    chunks: list[np.ndarray] = []
    with torch.no_grad():
        for start in range(0, len(sequences), batch_size):
            ids, padding_mask = pad_sequences(sequences[start : start + batch_size])
            chunks.append(torch.softmax(clf(ids, padding_mask), dim=-1).double().numpy())
    return np.concatenate(chunks, axis=0) if chunks else np.zeros((0, clf.num_classes))


class BlackBox(Protocol):
    """What metrics and defenses may see of a classifier: scores on hard sequences."""

    def predict_proba(self, sequences: Sequence[TokenSequence]) -> np.ndarray: ...


class BlackBoxClassifier:
    """Scores-only view of a trained classifier."""

    def __init__(self, clf: Classifier, batch_size: int = 256) -> None:
        self._clf = clf
        self._batch_size = batch_size
        self.num_classes = clf.num_classes

    def predict_proba(self, sequences: Sequence[TokenSequence]) -> np.ndarray:
        return predict_proba_batch(self._clf, sequences, self._batch_size)

    def predict(self, sequences: Sequence[TokenSequence]) -> np.ndarray:
        return self.predict_proba(sequences).argmax(axis=1)

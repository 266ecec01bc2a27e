"""Target-side metrics over attack results.

Only the black-box view of the target is used: batched probabilities on the
original and adversarial sequences.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from dilma.classifiers import BlackBox
from dilma.errors import DilmaErrorCodes, dilma_error

if TYPE_CHECKING:
    from dilma.attack import AttackResult


@dataclass(frozen=True, slots=True)
class TargetScores:
    """Target probabilities ``(N, C)`` on originals and adversarials, with gold labels ``(N,)``."""

    before: np.ndarray
    after: np.ndarray
    labels: np.ndarray
    wers: np.ndarray

    @property
    def flipped(self) -> np.ndarray:
        return self.before.argmax(axis=1) != self.after.argmax(axis=1)

    def true_class(self, probs: np.ndarray) -> np.ndarray:
        return probs[np.arange(len(self.labels)), self.labels]


def _require_results(results: Sequence["AttackResult"]) -> None:
    if not results:
        raise dilma_error(DilmaErrorCodes.NO_RESULTS, "no results to evaluate")


def score_with_target(results: Sequence["AttackResult"], target: BlackBox) -> TargetScores:
    """Score both sides with the target and fill the target score fields of each result."""
    _require_results(results)
    before = target.predict_proba([r.original.sequence for r in results])
    after = target.predict_proba([r.adversarial for r in results])
    labels = np.array([r.original.label for r in results], dtype=np.int64)
    scores = TargetScores(
        before=before, after=after, labels=labels, wers=np.array([r.wer for r in results], dtype=np.int64)
    )
    for result, p_before, p_after in zip(results, scores.true_class(before), scores.true_class(after), strict=True):
        result.target_score_before = float(p_before)
        result.target_score_after = float(p_after)
    return scores


def nad_from_flips(flipped: np.ndarray, wers: np.ndarray) -> float:
    """Mean of flip / wer; a zero-WER term contributes 0."""
    if len(flipped) == 0:
        raise dilma_error(DilmaErrorCodes.NO_RESULTS, "no results to evaluate")
    wers = np.asarray(wers, dtype=np.float64)
    terms = np.divide(np.asarray(flipped, dtype=np.float64), wers, out=np.zeros_like(wers), where=wers > 0)
    return float(terms.mean())


def nad(results: Sequence["AttackResult"], target: BlackBox) -> float:
    scores = score_with_target(results, target)
    return nad_from_flips(scores.flipped, scores.wers)


def accuracy_before(results: Sequence["AttackResult"], target: BlackBox) -> float:
    scores = score_with_target(results, target)
    return float(np.mean(scores.before.argmax(axis=1) == scores.labels))


def accuracy_after(results: Sequence["AttackResult"], target: BlackBox) -> float:
    """Fraction of adversarials the target assigns to the gold label."""
    scores = score_with_target(results, target)
    return float(np.mean(scores.after.argmax(axis=1) == scores.labels))


def prob_diff(results: Sequence["AttackResult"], target: BlackBox) -> float:
    """Mean drop of the gold-class probability, averaged over every attacked example."""
    scores = score_with_target(results, target)
    return float(np.mean(scores.true_class(scores.before) - scores.true_class(scores.after)))


def attack_success_rate(results: Sequence["AttackResult"], target: BlackBox) -> float:
    return float(np.mean(score_with_target(results, target).flipped))


def mean_wer(results: Sequence["AttackResult"]) -> float:
    _require_results(results)
    return float(np.mean([r.wer for r in results]))

import json
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, Field

from dilma.attack import AttackResult
from dilma.classifiers import BlackBox, Classifier, ClassifierConfig, fit_classifier
from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.logger import get_logger
from dilma.metrics import nad
from dilma.textcore import LabeledExample

logger = get_logger(__name__)

MAX_ADVERSARIAL_EXAMPLES = 5_000


def adversarial_examples(results: Sequence[AttackResult], limit: int = MAX_ADVERSARIAL_EXAMPLES) -> list[LabeledExample]:
    """Adversarial sequences labelled with the gold label of their originals."""
    return [
        LabeledExample(sequence=r.adversarial, label=r.original.label, raw_text=r.original.raw_text)
        for r in results[:limit]
    ]


def adversarial_retrain(
    train: Sequence[LabeledExample],
    adversarials: Sequence[AttackResult],
    config: ClassifierConfig,
    seed: int,
    *,
    vocab_size: int,
    num_classes: int,
) -> Classifier:
    """Train a fresh target from scratch on the clean data plus up to 5,000 adversarials."""
    if not adversarials:
        raise dilma_error(DilmaErrorCodes.NO_RESULTS, "adversarial retraining needs at least one adversarial example")
    extra = adversarial_examples(adversarials)
    logger.info("adversarial retraining", clean=len(train), adversarial=len(extra))
    return fit_classifier([*train, *extra], vocab_size, num_classes, config, seed, name="retrained_target")


class RetrainReport(BaseModel):
    attack_name: str
    n_adversarial: int = Field(ge=1)
    nad_before: float = Field(ge=0.0, le=1.0)
    nad_after: float = Field(ge=0.0, le=1.0)
    clean_accuracy_before: float = Field(ge=0.0, le=1.0)
    clean_accuracy_after: float = Field(ge=0.0, le=1.0)
    adversarial_accuracy_after: float = Field(
        ge=0.0, le=1.0, description="Fraction of the training-time adversarials the retrained target gets right"
    )

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"

    def write(self, path: Path) -> None:
        path.write_text(self.to_json(), encoding="utf-8")


def _accuracy(model: BlackBox, data: Sequence[LabeledExample]) -> float:
    probs = model.predict_proba([example.sequence for example in data])
    return float((probs.argmax(axis=1) == [example.label for example in data]).mean())


def retrain_report(
    results: Sequence[AttackResult],
    original_target: BlackBox,
    retrained_target: BlackBox,
    test: Sequence[LabeledExample],
) -> RetrainReport:
    """NAD of a frozen attack output against both targets, plus clean accuracy of each."""
    report = RetrainReport(
        attack_name=results[0].attack_name if results else "unknown",
        n_adversarial=min(len(results), MAX_ADVERSARIAL_EXAMPLES),
        nad_before=nad(results, original_target),
        nad_after=nad(results, retrained_target),
        clean_accuracy_before=_accuracy(original_target, test),
        clean_accuracy_after=_accuracy(retrained_target, test),
        adversarial_accuracy_after=_accuracy(retrained_target, adversarial_examples(results)),
    )
    logger.info("retraining evaluated", **report.model_dump())
    return report

import json
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field

from dilma.classifiers import BlackBox
from dilma.errors import DilmaError
from dilma.logger import get_logger
from dilma.textcore import TokenSequence

from .accuracy import nad_from_flips, score_with_target
from .diversity import dist_k, ent_k
from .tags import mean_tag_jaccard

if TYPE_CHECKING:
    from dilma.attack import AttackResult

logger = get_logger(__name__)

DIVERSITY_ORDERS = (1, 2, 3)

REPORT_METADATA = {
    "accuracy_reference": "gold_label",
    "ent_k_log_base": "e",
    "nad_zero_wer": "contributes_zero",
    "pd_averaging": "all_examples",
}


class EvaluationReport(BaseModel):
    attack_name: str
    n: int = Field(ge=1, description="Evaluated example count")
    nad: float = Field(ge=0.0, le=1.0)
    accuracy_before: float = Field(ge=0.0, le=1.0)
    accuracy_after: float = Field(ge=0.0, le=1.0)
    pd: float = Field(ge=-1.0, le=1.0, description="Mean gold-class probability drop")
    success_rate: float = Field(ge=0.0, le=1.0, description="Fraction of examples whose target prediction changed")
    mean_wer: float = Field(ge=0.0)
    dist_k_original: dict[int, float]
    dist_k_adversarial: dict[int, float]
    ent_k_original: dict[int, float]
    ent_k_adversarial: dict[int, float]
    tag_jaccard: dict[str, float] = Field(default_factory=dict)
    metadata: dict[str, str] = Field(default_factory=lambda: dict(REPORT_METADATA))

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"

    def write(self, path: Path) -> None:
        path.write_text(self.to_json(), encoding="utf-8")


def _diversity(sentences: Sequence[TokenSequence]) -> tuple[dict[int, float], dict[int, float]]:
    dist = {k: dist_k(sentences, k) for k in DIVERSITY_ORDERS}
    ent: dict[int, float] = {}
    for k in DIVERSITY_ORDERS:
        try:
            ent[k] = ent_k(sentences, k)
        except DilmaError:
            logger.warning("ent_k skipped, corpus has no k-grams", k=k)
    return dist, ent


def evaluate(
    results: Sequence["AttackResult"],
    target: BlackBox,
    *,
    tags: Mapping[str, tuple[Sequence[Sequence[str]], Sequence[Sequence[str]]]] | None = None,
) -> EvaluationReport:
    """
    Score an attack output against the target.

    `tags` maps a tag-set name (for example "pos" or "dep") to line-aligned tag lists
    of the originals and the adversarials.
    """
    scores = score_with_target(results, target)
    dist_original, ent_original = _diversity([r.original.sequence for r in results])
    dist_adversarial, ent_adversarial = _diversity([r.adversarial for r in results])
    report = EvaluationReport(
        attack_name=results[0].attack_name,
        n=len(results),
        nad=nad_from_flips(scores.flipped, scores.wers),
        accuracy_before=float(np.mean(scores.before.argmax(axis=1) == scores.labels)),
        accuracy_after=float(np.mean(scores.after.argmax(axis=1) == scores.labels)),
        pd=float(np.mean(scores.true_class(scores.before) - scores.true_class(scores.after))),
        success_rate=float(np.mean(scores.flipped)),
        mean_wer=float(np.mean(scores.wers)),
        dist_k_original=dist_original,
        dist_k_adversarial=dist_adversarial,
        ent_k_original=ent_original,
        ent_k_adversarial=ent_adversarial,
        tag_jaccard={name: mean_tag_jaccard(a, b) for name, (a, b) in (tags or {}).items()},
    )
    logger.info(
        "evaluation finished",
        attack_name=report.attack_name,
        n=report.n,
        nad=report.nad,
        accuracy_before=report.accuracy_before,
        accuracy_after=report.accuracy_after,
    )
    return report

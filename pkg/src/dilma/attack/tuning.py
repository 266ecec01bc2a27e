from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from dilma.classifiers import BlackBoxClassifier, Classifier
from dilma.deeplev import DeepLevenshtein
from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.lm import MaskedLanguageModel
from dilma.logger import get_logger
from dilma.metrics import nad
from dilma.textcore import LabeledExample

from .config import AttackConfig, SearchSpace
from .runner import attack_many

logger = get_logger(__name__)


@dataclass(frozen=True, slots=True)
class Trial:
    number: int
    config: AttackConfig
    score: float


@dataclass(frozen=True, slots=True)
class TuningOutcome:
    config: AttackConfig
    score: float
    trials: list[Trial] = field(default_factory=list)


def tune_hyperparams(
    search_space: SearchSpace,
    validation: Sequence[LabeledExample],
    budget: int,
    seed: int,
    *,
    mlm: MaskedLanguageModel,
    substitute: Classifier,
    deeplev: DeepLevenshtein | None = None,
    workers: int = 1,
) -> TuningOutcome:
    """
    Random search maximising NAD on the validation examples.

    The substitute stands in for the target when scoring, so tuning never queries
    the attacked model. The first trial with the best score wins.
    """
    if budget < 1:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, f"tuning budget must be at least 1, got {budget}")
    if not validation:
        raise dilma_error(DilmaErrorCodes.INSUFFICIENT_DATA, "tuning needs at least one validation example")

    rng = np.random.default_rng(seed)
    proxy = BlackBoxClassifier(substitute)
    trials: list[Trial] = []
    for number in range(budget):
        config = search_space.sample(rng, seed)
        results = attack_many(validation, mlm, substitute, deeplev, config, workers=workers)
        trial = Trial(number=number, config=config, score=nad(results, proxy))
        trials.append(trial)
        logger.info("tuning trial finished", trial=number, score=trial.score, **config.model_dump(mode="json"))

    best = max(trials, key=lambda t: t.score)  # max keeps the first maximum
    logger.info("tuning finished", best_trial=best.number, best_score=best.score)
    return TuningOutcome(config=best.config, score=best.score, trials=trials)

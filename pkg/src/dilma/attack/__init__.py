from .config import AttackConfig, AttackVariant, SearchSpace
from .loss import C_Y_MAX, dilma_loss, was_clamped
from .objective import DilmaObjective, ObjectiveValue
from .result import (
    AttackRecord,
    AttackResult,
    CandidateRecord,
    IterationRecord,
    read_attack_file,
    write_attack_file,
)
from .runner import attack_many, dilma_attack, run_attack, run_dilma, sampling_fool
from .selection import Selection, select_candidate
from .tuning import Trial, TuningOutcome, tune_hyperparams

__all__ = [
    "C_Y_MAX",
    "AttackConfig",
    "AttackRecord",
    "AttackResult",
    "AttackVariant",
    "CandidateRecord",
    "DilmaObjective",
    "IterationRecord",
    "ObjectiveValue",
    "SearchSpace",
    "Selection",
    "Trial",
    "TuningOutcome",
    "attack_many",
    "dilma_attack",
    "dilma_loss",
    "read_attack_file",
    "run_attack",
    "run_dilma",
    "sampling_fool",
    "select_candidate",
    "tune_hyperparams",
    "was_clamped",
]

from .accuracy import (
    TargetScores,
    accuracy_after,
    accuracy_before,
    attack_success_rate,
    mean_wer,
    nad,
    nad_from_flips,
    prob_diff,
    score_with_target,
)
from .diversity import dist_k, ent_k, kgrams
from .report import DIVERSITY_ORDERS, REPORT_METADATA, EvaluationReport, evaluate
from .tags import TagRecord, mean_tag_jaccard, multiset_jaccard, read_tag_file

__all__ = [
    "DIVERSITY_ORDERS",
    "REPORT_METADATA",
    "EvaluationReport",
    "TagRecord",
    "TargetScores",
    "accuracy_after",
    "accuracy_before",
    "attack_success_rate",
    "dist_k",
    "ent_k",
    "evaluate",
    "kgrams",
    "mean_tag_jaccard",
    "mean_wer",
    "multiset_jaccard",
    "nad",
    "nad_from_flips",
    "prob_diff",
    "read_tag_file",
    "score_with_target",
]

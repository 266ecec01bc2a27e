from .model import DeepLevConfig, DeepLevenshtein, SequenceEncoder
from .pairs import EditPair, apply_random_edits, generate_pairs, load_pairs, save_pairs
from .training import (
    MIN_TRAINING_PAIRS,
    DeepLevEvaluation,
    dl_distance,
    evaluate_deeplev,
    predict_pairs,
    train_deeplev,
)

__all__ = [
    "MIN_TRAINING_PAIRS",
    "DeepLevConfig",
    "DeepLevEvaluation",
    "DeepLevenshtein",
    "EditPair",
    "SequenceEncoder",
    "apply_random_edits",
    "dl_distance",
    "evaluate_deeplev",
    "generate_pairs",
    "load_pairs",
    "predict_pairs",
    "save_pairs",
    "train_deeplev",
]

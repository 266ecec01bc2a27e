from .models import Architecture, Classifier, ClassifierConfig, LSTMClassifier, TransformerClassifier, build_classifier
from .scoring import (
    BlackBox,
    BlackBoxClassifier,
    ClassifierScores,
    predict_proba,
    predict_proba_batch,
)
from .training import SubstituteSource, accuracy, fit_classifier, train_substitute, train_target

__all__ = [
    "Architecture",
    "BlackBox",
    "BlackBoxClassifier",
    "Classifier",
    "ClassifierConfig",
    "ClassifierScores",
    "LSTMClassifier",
    "SubstituteSource",
    "TransformerClassifier",
    "accuracy",
    "build_classifier",
    "fit_classifier",
    "predict_proba",
    "predict_proba_batch",
    "train_substitute",
    "train_target",
]

from .detection import (
    MIN_DETECTION_SIZE,
    TEST_SHARE,
    VALIDATION_SHARE,
    DetectionExample,
    DetectionLabel,
    DetectionReport,
    DetectionSet,
    DiscriminatorConfig,
    build_detection_set,
    detection_roc_auc,
    score_detection,
    train_discriminator,
)
from .retrain import MAX_ADVERSARIAL_EXAMPLES, RetrainReport, adversarial_examples, adversarial_retrain, retrain_report
from .roc import roc_auc

__all__ = [
    "MAX_ADVERSARIAL_EXAMPLES",
    "MIN_DETECTION_SIZE",
    "TEST_SHARE",
    "VALIDATION_SHARE",
    "DetectionExample",
    "DetectionLabel",
    "DetectionReport",
    "DetectionSet",
    "DiscriminatorConfig",
    "RetrainReport",
    "adversarial_examples",
    "adversarial_retrain",
    "build_detection_set",
    "detection_roc_auc",
    "retrain_report",
    "roc_auc",
    "score_detection",
    "train_discriminator",
]

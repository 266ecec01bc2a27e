from enum import StrEnum


class DilmaErrorCodes(StrEnum):
    UNEXPECTED_ERROR = "unexpected_error"
    INVALID_INPUT = "invalid_input"
    EMPTY_DATASET = "empty_dataset"
    MALFORMED_RECORD = "malformed_record"
    UNKNOWN_LABEL = "unknown_label"
    INSUFFICIENT_DATA = "insufficient_data"
    INVALID_CONFIG = "invalid_config"
    MISSING_ARTIFACT = "missing_artifact"
    VOCABULARY_MISMATCH = "vocabulary_mismatch"
    NO_RESULTS = "no_results"

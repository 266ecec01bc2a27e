from .evaluation import masked_recovery_accuracy, visible_top_k_rate
from .model import (
    EMBEDDINGS,
    ENCODER_LAYERS,
    FINAL_ENCODER_LAYER,
    OUTPUT_PROJECTION,
    PARAMETER_GROUP_NAMES,
    MaskedLanguageModel,
    MLMConfig,
    ParameterSubset,
)
from .pretrain import LogitMatrix, MLMParams, clone_params, lm_logits, mask_tokens, pretrain_mlm

__all__ = [
    "EMBEDDINGS",
    "ENCODER_LAYERS",
    "FINAL_ENCODER_LAYER",
    "OUTPUT_PROJECTION",
    "PARAMETER_GROUP_NAMES",
    "LogitMatrix",
    "MLMConfig",
    "MLMParams",
    "MaskedLanguageModel",
    "ParameterSubset",
    "clone_params",
    "lm_logits",
    "mask_tokens",
    "masked_recovery_accuracy",
    "pretrain_mlm",
    "visible_top_k_rate",
]

from .dataset import Corpus, DatasetRecord, DatasetSplit, load_dataset, split_for_substitute, write_dataset
from .synthetic import SyntheticSettings, generate_from_settings, generate_synthetic, marker_words, synthetic_vocabulary
from .vocab import (
    MASK_TOKEN,
    PAD_TOKEN,
    SPECIAL_TOKENS,
    UNK_TOKEN,
    LabeledExample,
    TokenSequence,
    Vocabulary,
    build_vocabulary,
    detokenize,
    normalize,
    tokenize,
)
from .wer import wer

__all__ = [
    "MASK_TOKEN",
    "PAD_TOKEN",
    "SPECIAL_TOKENS",
    "UNK_TOKEN",
    "Corpus",
    "DatasetRecord",
    "DatasetSplit",
    "LabeledExample",
    "SyntheticSettings",
    "TokenSequence",
    "Vocabulary",
    "build_vocabulary",
    "detokenize",
    "generate_from_settings",
    "generate_synthetic",
    "load_dataset",
    "marker_words",
    "normalize",
    "split_for_substitute",
    "synthetic_vocabulary",
    "tokenize",
    "wer",
    "write_dataset",
]

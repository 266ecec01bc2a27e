import sys
from pathlib import Path

import pytest
import torch

# Ensure src/ is on the path for tests without requiring installation.
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from dilma.classifiers import ClassifierConfig, LSTMClassifier  # noqa: E402
from dilma.deeplev import DeepLevConfig, DeepLevenshtein  # noqa: E402
from dilma.lm import MaskedLanguageModel, MLMConfig  # noqa: E402
from dilma.textcore import LabeledExample, TokenSequence, Vocabulary, synthetic_vocabulary  # noqa: E402

TINY_WORDS = 12


@pytest.fixture
def tiny_vocab() -> Vocabulary:
    return synthetic_vocabulary(TINY_WORDS)


@pytest.fixture
def tiny_mlm(tiny_vocab: Vocabulary) -> MaskedLanguageModel:
    torch.manual_seed(0)
    config = MLMConfig(num_layers=2, width=16, heads=2, ff_width=32, max_length=16, dropout=0.0)
    return MaskedLanguageModel(tiny_vocab.size, config).eval()


@pytest.fixture
def tiny_substitute(tiny_vocab: Vocabulary) -> LSTMClassifier:
    torch.manual_seed(1)
    config = ClassifierConfig.substitute_defaults(embedding_dim=8, hidden=8, dropout=0.0, max_length=16)
    return LSTMClassifier(tiny_vocab.size, 2, config).eval()


@pytest.fixture
def tiny_deeplev(tiny_vocab: Vocabulary) -> DeepLevenshtein:
    torch.manual_seed(2)
    return DeepLevenshtein(tiny_vocab.size, DeepLevConfig(embedding_dim=8, encoder_hidden=8, head_hidden=16)).eval()


@pytest.fixture
def example() -> LabeledExample:
    ids = (3, 7, 9, 4, 12, 5)
    return LabeledExample(sequence=TokenSequence(ids), label=0, raw_text=" ".join(f"w{i - 3}" for i in ids))

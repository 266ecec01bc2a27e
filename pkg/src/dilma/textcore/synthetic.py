"""Marker-based synthetic classification corpus.

Each class owns a disjoint block of marker words. A sentence is a walk over
filler words with one or two markers of its class dropped in, so the label is
recoverable by marker lookup alone.
"""

import numpy as np
from pydantic import BaseModel, Field, model_validator

from dilma.errors import DilmaErrorCodes, dilma_error

from .vocab import SPECIAL_TOKENS, LabeledExample, TokenSequence, Vocabulary


class SyntheticSettings(BaseModel):
    n: int = Field(ge=1, description="Number of sentences")
    vocab_size: int = Field(ge=2, description="Number of regular words")
    num_classes: int = Field(ge=2, description="Number of classes")
    seed: int = Field(default=0, description="Generator seed")
    min_length: int = Field(default=5, ge=1)
    max_length: int = Field(default=20, ge=1)
    successors: int = Field(default=2, ge=1, description="Preferred successors per filler word")
    successor_mass: float = Field(default=0.85, ge=0.0, le=1.0, description="Probability of moving to a preferred successor")

    @model_validator(mode="after")
    def _check(self) -> "SyntheticSettings":
        if self.vocab_size < 2 * self.num_classes:
            raise ValueError("vocab_size must be at least 2 * num_classes")
        if self.min_length > self.max_length:
            raise ValueError("min_length must not exceed max_length")
        return self

    @property
    def markers_per_class(self) -> int:
        return max(1, self.vocab_size // (5 * self.num_classes))


def word(index: int) -> str:
    return f"w{index}"


def synthetic_vocabulary(vocab_size: int) -> Vocabulary:
    return Vocabulary([*SPECIAL_TOKENS, *(word(i) for i in range(vocab_size))])


def marker_words(settings: SyntheticSettings) -> dict[int, list[str]]:
    """Marker words per class; words `w0 .. w{M*C-1}` in class-sized blocks."""
    m = settings.markers_per_class
    return {c: [word(c * m + j) for j in range(m)] for c in range(settings.num_classes)}


def generate_synthetic(n: int, vocab_size: int, num_classes: int, seed: int) -> list[LabeledExample]:
    try:
        settings = SyntheticSettings(n=n, vocab_size=vocab_size, num_classes=num_classes, seed=seed)
    except ValueError as e:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, str(e)) from e
    return generate_from_settings(settings)


def generate_from_settings(settings: SyntheticSettings) -> list[LabeledExample]:
    rng = np.random.default_rng(settings.seed)
    vocab = synthetic_vocabulary(settings.vocab_size)
    offset = len(SPECIAL_TOKENS)

    m = settings.markers_per_class
    n_markers = m * settings.num_classes
    fillers = np.arange(n_markers, settings.vocab_size)
    k = min(settings.successors, len(fillers))
    preferred = np.stack([rng.choice(fillers, size=k, replace=False) for _ in fillers])

    labels = rng.permutation(np.arange(settings.n) % settings.num_classes)

    examples: list[LabeledExample] = []
    for label in labels:
        length = int(rng.integers(settings.min_length, settings.max_length + 1))
        words = np.empty(length, dtype=np.int64)
        current = int(rng.choice(fillers))
        for i in range(length):
            words[i] = current
            row = current - n_markers
            if rng.random() < settings.successor_mass:
                current = int(rng.choice(preferred[row]))
            else:
                current = int(rng.choice(fillers))

        n_class_markers = min(int(rng.integers(1, 3)), length)
        positions = rng.choice(length, size=n_class_markers, replace=False)
        for position in positions:
            words[position] = int(label) * m + int(rng.integers(m))

        text = " ".join(word(int(w)) for w in words)
        sequence = TokenSequence(tuple(int(w) + offset for w in words))
        examples.append(LabeledExample(sequence=sequence, label=int(label), raw_text=text))

    # The vocabulary is deterministic from vocab_size; validate the last sequence against it.
    if examples:
        vocab.validate(examples[-1].sequence)
    return examples

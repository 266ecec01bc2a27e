import hashlib
import json
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import torch

from dilma.errors import DilmaErrorCodes, dilma_error

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
MASK_TOKEN = "<mask>"
SPECIAL_TOKENS = (PAD_TOKEN, UNK_TOKEN, MASK_TOKEN)


def normalize(text: str) -> list[str]:
    """Lowercase and split on any run of whitespace."""
    return text.lower().split()


class Vocabulary:
    """Bijection between word tokens and integer ids.

    Ids 0, 1 and 2 are always PAD, UNK and MASK; regular tokens follow.
    """

    def __init__(self, tokens: Sequence[str]) -> None:
        if tuple(tokens[: len(SPECIAL_TOKENS)]) != SPECIAL_TOKENS:
            raise dilma_error(DilmaErrorCodes.INVALID_INPUT, f"vocabulary must start with {SPECIAL_TOKENS}")
        if len(set(tokens)) != len(tokens):
            raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "vocabulary tokens must be unique")
        self.id_to_token: tuple[str, ...] = tuple(tokens)
        self.token_to_id: dict[str, int] = {token: i for i, token in enumerate(self.id_to_token)}

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def unk_id(self) -> int:
        return 1

    @property
    def mask_id(self) -> int:
        return 2

    @property
    def size(self) -> int:
        """Vocabulary size d."""
        return len(self.id_to_token)

    def __len__(self) -> int:
        return self.size

    @property
    def regular_ids(self) -> range:
        """Ids of non-special tokens, the pool random edits and replacements draw from."""
        return range(len(SPECIAL_TOKENS), self.size)

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.token_to_id.get(token, self.unk_id) for token in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.id_to_token[i] for i in ids]

    def validate(self, sequence: "TokenSequence") -> None:
        if max(sequence.ids) >= self.size:
            raise dilma_error(
                DilmaErrorCodes.INVALID_INPUT,
                f"token id {max(sequence.ids)} out of range for vocabulary of size {self.size}",
            )

    def content_hash(self) -> str:
        return hashlib.sha256("\n".join(self.id_to_token).encode("utf-8")).hexdigest()

    def save(self, path: Path) -> None:
        path.write_text(json.dumps({"tokens": list(self.id_to_token)}, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "Vocabulary":
        return cls(json.loads(path.read_text(encoding="utf-8"))["tokens"])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self.id_to_token == other.id_to_token

    def __hash__(self) -> int:
        return hash(self.id_to_token)


def build_vocabulary(texts: Iterable[str]) -> Vocabulary:
    """Build a vocabulary from training texts, most frequent tokens first (ties alphabetical)."""
    counts = Counter(token for text in texts for token in normalize(text))
    for special in SPECIAL_TOKENS:
        counts.pop(special, None)
    ordered = sorted(counts, key=lambda token: (-counts[token], token))
    return Vocabulary([*SPECIAL_TOKENS, *ordered])


@dataclass(frozen=True, slots=True)
class TokenSequence:
    """An ordered, non-empty list of token ids."""

    ids: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        if not self.ids:
            raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "token sequence must contain at least one token")
        if min(self.ids) < 0:
            raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "token ids must be non-negative")

    @property
    def t(self) -> int:
        return len(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids)

    def as_tensor(self) -> torch.Tensor:
        return torch.tensor(self.ids, dtype=torch.long)


@dataclass(frozen=True, slots=True)
class LabeledExample:
    sequence: TokenSequence
    label: int
    raw_text: str


def tokenize(text: str, vocab: Vocabulary) -> TokenSequence:
    tokens = normalize(text)
    if not tokens:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "text is empty after normalization")
    return TokenSequence(tuple(vocab.encode(tokens)))


def detokenize(sequence: TokenSequence, vocab: Vocabulary) -> str:
    return " ".join(vocab.decode(sequence.ids))

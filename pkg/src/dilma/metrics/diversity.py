import math
from collections import Counter
from collections.abc import Iterator, Sequence

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.textcore import TokenSequence


def _check_k(k: int) -> None:
    if k < 1:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, f"k must be at least 1, got {k}")


def kgrams(sentences: Sequence[TokenSequence], k: int) -> Iterator[tuple[int, ...]]:
    for sentence in sentences:
        ids = sentence.ids
        for start in range(len(ids) - k + 1):
            yield ids[start : start + k]


def dist_k(sentences: Sequence[TokenSequence], k: int) -> float:
    """Distinct k-grams across the corpus divided by its total token count."""
    _check_k(k)
    total_tokens = sum(len(s) for s in sentences)
    if total_tokens == 0:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "dist_k needs at least one token")
    return len(set(kgrams(sentences, k))) / total_tokens


def ent_k(sentences: Sequence[TokenSequence], k: int) -> float:
    """Natural-log entropy of the corpus k-gram frequency distribution."""
    _check_k(k)
    counts = Counter(kgrams(sentences, k))
    total = sum(counts.values())
    if total == 0:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, f"no {k}-grams in the corpus")
    return -sum((c / total) * math.log(c / total) for c in counts.values())

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from datasets import Dataset

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.logger import get_logger
from dilma.textcore import TokenSequence, wer

logger = get_logger(__name__)

EDIT_INSERT, EDIT_DELETE, EDIT_SUBSTITUTE = 0, 1, 2


@dataclass(frozen=True, slots=True)
class EditPair:
    a: TokenSequence
    b: TokenSequence
    true_wer: int


def apply_random_edits(
    ids: list[int], edits: int, rng: np.random.Generator, token_pool: Sequence[int]
) -> list[int]:
    """Apply `edits` uniformly typed word edits. Deleting the last remaining token becomes a substitution."""
    ids = list(ids)
    for _ in range(edits):
        kind = int(rng.integers(3))
        if kind == EDIT_DELETE and len(ids) == 1:
            kind = EDIT_SUBSTITUTE
        token = int(token_pool[int(rng.integers(len(token_pool)))])
        if kind == EDIT_INSERT:
            ids.insert(int(rng.integers(len(ids) + 1)), token)
        elif kind == EDIT_DELETE:
            del ids[int(rng.integers(len(ids)))]
        else:
            ids[int(rng.integers(len(ids)))] = token
    return ids


def generate_pairs(
    corpus: Sequence[TokenSequence],
    n: int,
    rng: np.random.Generator,
    token_pool: Sequence[int],
    max_edits: int = 5,
) -> list[EditPair]:
    """
    Sample (sentence, edited sentence) pairs labelled with their exact WER.

    The edit count is uniform on 0..max_edits; the label is the true distance,
    which can be below the number of edits applied.
    """
    if not corpus:
        raise dilma_error(DilmaErrorCodes.EMPTY_DATASET, "pair generation needs a non-empty corpus")
    if not token_pool:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "token pool for random edits is empty")

    pairs: list[EditPair] = []
    for _ in range(n):
        base = corpus[int(rng.integers(len(corpus)))]
        edits = int(rng.integers(max_edits + 1))
        edited = TokenSequence(tuple(apply_random_edits(list(base.ids), edits, rng, token_pool)))
        pairs.append(EditPair(a=base, b=edited, true_wer=wer(base, edited)))
    return pairs


def save_pairs(pairs: Sequence[EditPair], path: Path) -> None:
    dataset = Dataset.from_dict({
        "a": [list(pair.a.ids) for pair in pairs],
        "b": [list(pair.b.ids) for pair in pairs],
        "wer": [pair.true_wer for pair in pairs],
    })
    dataset.to_json(str(path), lines=True)
    logger.info("pair cache written", path=str(path), pairs=len(pairs))


def load_pairs(path: Path) -> list[EditPair]:
    if not path.exists():
        raise dilma_error(DilmaErrorCodes.MISSING_ARTIFACT, f"pair cache {path} does not exist")
    dataset = Dataset.from_json(str(path), keep_in_memory=True, cache_dir=str(path.parent / ".hf-cache"))
    return [
        EditPair(a=TokenSequence(tuple(row["a"])), b=TokenSequence(tuple(row["b"])), true_wer=int(row["wer"]))
        for row in dataset
    ]

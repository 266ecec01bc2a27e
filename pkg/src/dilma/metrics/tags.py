import json
from collections import Counter
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, ValidationError

from dilma.errors import DilmaErrorCodes, dilma_error


class TagRecord(BaseModel):
    """One line of a tag file: the POS or dependency tags of one sentence."""

    tags: list[str]


def multiset_jaccard(tags_a: Sequence[str], tags_b: Sequence[str]) -> float:
    """Jaccard similarity with duplicates counted: sum of min counts over sum of max counts."""
    if not tags_a and not tags_b:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "both tag lists are empty")
    a, b = Counter(tags_a), Counter(tags_b)
    keys = a.keys() | b.keys()
    return sum(min(a[t], b[t]) for t in keys) / sum(max(a[t], b[t]) for t in keys)


def read_tag_file(path: Path) -> list[list[str]]:
    if not path.exists():
        raise dilma_error(DilmaErrorCodes.MISSING_ARTIFACT, f"tag file {path} does not exist")
    tags: list[list[str]] = []
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                tags.append(TagRecord.model_validate(json.loads(line)).tags)
            except (ValidationError, json.JSONDecodeError) as e:
                raise dilma_error(DilmaErrorCodes.MALFORMED_RECORD, f"{path}: line {line_number}: {e}") from e
    return tags


def mean_tag_jaccard(original_tags: Sequence[Sequence[str]], adversarial_tags: Sequence[Sequence[str]]) -> float:
    """Mean multiset Jaccard over line-aligned tag lists."""
    if len(original_tags) != len(adversarial_tags):
        raise dilma_error(
            DilmaErrorCodes.INVALID_INPUT,
            f"tag files are not aligned: {len(original_tags)} vs {len(adversarial_tags)} lines",
        )
    if not original_tags:
        raise dilma_error(DilmaErrorCodes.NO_RESULTS, "no tag lines to compare")
    return sum(multiset_jaccard(a, b) for a, b in zip(original_tags, adversarial_tags, strict=True)) / len(original_tags)

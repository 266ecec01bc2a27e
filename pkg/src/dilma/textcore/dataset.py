import json
from collections import defaultdict
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from dilma.errors import DilmaError, DilmaErrorCodes, dilma_error
from dilma.logger import get_logger

from .vocab import LabeledExample, Vocabulary, build_vocabulary, tokenize

logger = get_logger(__name__)


class DatasetRecord(BaseModel):
    """One line of a JSON-lines dataset file."""

    model_config = ConfigDict(extra="ignore")

    text: str = Field(description="Raw sentence")
    label: int = Field(ge=0, description="Class index")


@dataclass(slots=True)
class Corpus:
    """Examples from one dataset file plus the vocabulary and class count they are encoded with."""

    examples: list[LabeledExample]
    vocab: Vocabulary
    num_classes: int

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[LabeledExample]:
        return iter(self.examples)

    def __getitem__(self, index: int) -> LabeledExample:
        return self.examples[index]


@dataclass(slots=True)
class DatasetSplit:
    target_half: list[LabeledExample]
    substitute_half: list[LabeledExample]


def _read_records(path: Path) -> list[tuple[int, DatasetRecord]]:
    records: list[tuple[int, DatasetRecord]] = []
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                records.append((line_number, DatasetRecord.model_validate_json(line)))
            except ValidationError as e:
                first = e.errors()[0]
                where = ".".join(str(part) for part in first["loc"]) or "line"
                raise dilma_error(
                    DilmaErrorCodes.MALFORMED_RECORD, f"{path}: line {line_number}: {where}: {first['msg']}"
                ) from e
    return records


def load_dataset(path: Path, vocab: Vocabulary | None = None, num_classes: int | None = None) -> Corpus:
    """
    Load a JSON-lines dataset.

    Without `vocab` the file is treated as the training file: the vocabulary and class
    count are built from it. With `vocab`, out-of-vocabulary tokens map to UNK and labels
    must be below `num_classes`.
    """
    if not path.exists():
        raise dilma_error(DilmaErrorCodes.MISSING_ARTIFACT, f"dataset file {path} does not exist")

    records = _read_records(path)
    if not records:
        raise dilma_error(DilmaErrorCodes.EMPTY_DATASET, f"empty dataset: {path}")

    if vocab is None:
        vocab = build_vocabulary(record.text for _, record in records)
    if num_classes is None:
        num_classes = max(record.label for _, record in records) + 1

    examples: list[LabeledExample] = []
    for line_number, record in records:
        if record.label >= num_classes:
            raise dilma_error(
                DilmaErrorCodes.UNKNOWN_LABEL,
                f"{path}: line {line_number}: label {record.label} unknown (expected < {num_classes})",
            )
        try:
            sequence = tokenize(record.text, vocab)
        except DilmaError as e:
            raise dilma_error(DilmaErrorCodes.MALFORMED_RECORD, f"{path}: line {line_number}: {e}") from e
        examples.append(LabeledExample(sequence=sequence, label=record.label, raw_text=record.text))

    logger.info("dataset loaded", path=str(path), examples=len(examples), vocab_size=vocab.size)
    return Corpus(examples=examples, vocab=vocab, num_classes=num_classes)


def write_dataset(path: Path, examples: Sequence[LabeledExample]) -> None:
    with path.open("w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(json.dumps({"text": example.raw_text, "label": example.label}, ensure_ascii=False) + "\n")


def split_for_substitute(data: Sequence[LabeledExample], seed: int) -> DatasetSplit:
    """
    Split examples 50/50, stratified by class.

    Odd classes hand their extra example to whichever half is currently smaller, so the
    halves never differ by more than one example overall or per class.
    """
    by_class: dict[int, list[LabeledExample]] = defaultdict(list)
    for example in data:
        by_class[example.label].append(example)

    for label, members in by_class.items():
        if len(members) < 2:
            raise dilma_error(
                DilmaErrorCodes.INSUFFICIENT_DATA, f"class {label} has {len(members)} example(s); at least 2 needed"
            )

    rng = np.random.default_rng(seed)
    target_half: list[LabeledExample] = []
    substitute_half: list[LabeledExample] = []
    for label in sorted(by_class):
        members = by_class[label]
        order = rng.permutation(len(members))
        half = len(members) // 2
        if len(members) % 2 == 1 and len(target_half) <= len(substitute_half):
            half += 1
        target_half.extend(members[i] for i in order[:half])
        substitute_half.extend(members[i] for i in order[half:])

    return DatasetSplit(target_half=target_half, substitute_half=substitute_half)

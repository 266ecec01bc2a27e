import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.textcore import LabeledExample, TokenSequence, Vocabulary, detokenize, tokenize, wer


@dataclass(frozen=True, slots=True)
class CandidateRecord:
    sequence: TokenSequence
    iteration: int
    order: int  # position within its iteration
    true_class_score: float
    flipped: bool  # substitute prediction differs from the true class
    wer: int


@dataclass(frozen=True, slots=True)
class IterationRecord:
    iteration: int
    loss: float
    clamped: bool = False
    aborted: bool = False


@dataclass(slots=True)
class AttackResult:
    original: LabeledExample
    adversarial: TokenSequence
    wer: int
    substitute_score_before: float
    substitute_score_after: float
    attack_name: str
    seed: int
    iterations_run: int = 0
    failed: bool = False
    target_score_before: float | None = None
    target_score_after: float | None = None
    candidates: list[CandidateRecord] = field(default_factory=list)
    iterations: list[IterationRecord] = field(default_factory=list)

    def to_record(self, vocab: Vocabulary) -> "AttackRecord":
        return AttackRecord(
            original_text=self.original.raw_text,
            adversarial_text=detokenize(self.adversarial, vocab),
            label=self.original.label,
            wer=self.wer,
            substitute_score_before=self.substitute_score_before,
            substitute_score_after=self.substitute_score_after,
            attack_name=self.attack_name,
            seed=self.seed,
            failed=self.failed,
        )

    @classmethod
    def from_record(cls, record: "AttackRecord", vocab: Vocabulary) -> "AttackResult":
        """Re-encode a file record; WER is recomputed on the encoded sequences."""
        original = tokenize(record.original_text, vocab)
        adversarial = tokenize(record.adversarial_text, vocab)
        return cls(
            original=LabeledExample(sequence=original, label=record.label, raw_text=record.original_text),
            adversarial=adversarial,
            wer=wer(original, adversarial),
            substitute_score_before=record.substitute_score_before,
            substitute_score_after=record.substitute_score_after,
            attack_name=record.attack_name,
            seed=record.seed,
            failed=record.failed,
        )


class AttackRecord(BaseModel):
    """One line of an attack output file; the contract shared with external attack producers."""

    model_config = ConfigDict(extra="ignore")

    original_text: str
    adversarial_text: str
    label: int = Field(ge=0)
    wer: int = Field(ge=0)
    substitute_score_before: float = Field(default=float("nan"))
    substitute_score_after: float = Field(default=float("nan"))
    attack_name: str
    seed: int = 0
    failed: bool = False


def write_attack_file(path: Path, results: Sequence[AttackResult], vocab: Vocabulary) -> None:
    with path.open("w", encoding="utf-8") as handle:
        for result in results:
            handle.write(result.to_record(vocab).model_dump_json() + "\n")


def read_attack_file(path: Path) -> list[AttackRecord]:
    if not path.exists():
        raise dilma_error(DilmaErrorCodes.MISSING_ARTIFACT, f"attack file {path} does not exist; run attack first")
    records: list[AttackRecord] = []
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                records.append(AttackRecord.model_validate(json.loads(line)))
            except (ValidationError, json.JSONDecodeError) as e:
                raise dilma_error(DilmaErrorCodes.MALFORMED_RECORD, f"{path}: line {line_number}: {e}") from e
    if not records:
        raise dilma_error(DilmaErrorCodes.NO_RESULTS, f"no results in {path}")
    return records

from collections.abc import Sequence
from dataclasses import dataclass

from dilma.textcore import TokenSequence

from .result import CandidateRecord


@dataclass(frozen=True, slots=True)
class Selection:
    sequence: TokenSequence
    record: CandidateRecord | None
    failed: bool


def select_candidate(log: Sequence[CandidateRecord], x: TokenSequence) -> Selection:
    """
    Pick the adversarial sequence from a candidate log.

    Candidates equal to x are ignored. Among candidates that flip the substitute,
    the lowest WER wins, then the lowest true-class score, then the earliest. If none
    flips, the lowest true-class score wins. If every candidate equals x, x is
    returned and the selection is marked failed.
    """
    pool = [record for record in log if record.sequence != x]
    if not pool:
        return Selection(sequence=x, record=None, failed=True)

    flipping = [record for record in pool if record.flipped]
    if flipping:
        best = min(flipping, key=lambda r: (r.wer, r.true_class_score, r.iteration, r.order))
    else:
        best = min(pool, key=lambda r: (r.true_class_score, r.iteration, r.order))
    return Selection(sequence=best.sequence, record=best, failed=False)

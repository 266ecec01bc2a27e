import jiwer

from .vocab import TokenSequence


def _as_words(sequence: TokenSequence) -> list[str]:
    # Ids as words keeps the distance purely positional; no text normalisation applies.
    return [str(token_id) for token_id in sequence.ids]


def wer(a: TokenSequence, b: TokenSequence) -> int:
    """Word-level Levenshtein distance: minimum insertions, deletions and substitutions turning a into b."""
    output = jiwer.process_words(" ".join(_as_words(a)), " ".join(_as_words(b)))
    return output.substitutions + output.deletions + output.insertions

import json
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dilma.attack import AttackResult
from dilma.errors import DilmaError
from dilma.metrics import (
    accuracy_after,
    accuracy_before,
    attack_success_rate,
    dist_k,
    ent_k,
    evaluate,
    mean_tag_jaccard,
    multiset_jaccard,
    nad,
    nad_from_flips,
    prob_diff,
    read_tag_file,
)
from dilma.textcore import LabeledExample, TokenSequence


class FakeTarget:
    """Scores looked up per sequence; unknown sequences get `default`."""

    def __init__(self, table: dict[TokenSequence, list[float]], default: list[float] | None = None) -> None:
        self.table = table
        self.default = default or [0.5, 0.5]

    def predict_proba(self, sequences: Sequence[TokenSequence]) -> np.ndarray:
        return np.array([self.table.get(s, self.default) for s in sequences], dtype=np.float64)


def seq(*ids: int) -> TokenSequence:
    return TokenSequence(ids)


def result(original: TokenSequence, adversarial: TokenSequence, wer: int, label: int = 0) -> AttackResult:
    return AttackResult(
        original=LabeledExample(original, label, ""),
        adversarial=adversarial,
        wer=wer,
        substitute_score_before=0.0,
        substitute_score_after=0.0,
        attack_name="dilma_dl",
        seed=0,
    )


ORIGINALS = [seq(3, 4, 5), seq(6, 7, 8)]
ADVERSARIALS = [seq(9, 4, 5), seq(9, 9, 8)]
TARGET = FakeTarget(
    {
        ORIGINALS[0]: [0.9, 0.1],
        ORIGINALS[1]: [0.8, 0.2],
        ADVERSARIALS[0]: [0.3, 0.7],
        ADVERSARIALS[1]: [0.4, 0.6],
    }
)


class TestNAD:
    def test_fixture(self):
        results = [result(ORIGINALS[0], ADVERSARIALS[0], 1), result(ORIGINALS[1], ADVERSARIALS[1], 2)]
        assert nad(results, TARGET) == pytest.approx(0.75)

    def test_identity_attack(self):
        results = [result(o, o, 0) for o in ORIGINALS]
        assert nad(results, TARGET) == 0.0

    def test_all_flipped_at_one_edit(self):
        assert nad_from_flips(np.array([True, True, True]), np.array([1, 1, 1])) == 1.0

    def test_zero_wer_contributes_nothing(self):
        assert nad_from_flips(np.array([True, True]), np.array([0, 1])) == 0.5

    def test_more_edits_never_raise_the_score(self):
        flips = np.array([True, False, True])
        assert nad_from_flips(flips, np.array([1, 1, 3])) <= nad_from_flips(flips, np.array([1, 1, 2]))

    def test_empty_results(self):
        with pytest.raises(DilmaError):
            nad([], TARGET)


class TestTargetAccuracy:
    def test_identity_attack_keeps_accuracy(self):
        results = [result(o, o, 0) for o in ORIGINALS]
        assert accuracy_after(results, TARGET) == accuracy_before(results, TARGET) == 1.0
        assert prob_diff(results, TARGET) == 0.0

    def test_every_prediction_flipped(self):
        results = [result(o, a, 1) for o, a in zip(ORIGINALS, ADVERSARIALS, strict=True)]
        assert accuracy_after(results, TARGET) == 0.0
        assert attack_success_rate(results, TARGET) == 1.0

    def test_probability_difference(self):
        target = FakeTarget({seq(3): [0.9, 0.1], seq(4): [0.6, 0.4]})
        assert prob_diff([result(seq(3), seq(4), 1)], target) == pytest.approx(0.3)

    def test_probability_difference_positive_when_accuracy_drops(self):
        target = FakeTarget({
            seq(3): [0.8, 0.2],
            seq(4): [0.4, 0.6],
            seq(5): [0.7, 0.3],
            seq(6): [0.65, 0.35],
            seq(7): [0.1, 0.9],
            seq(8): [0.2, 0.8],
        })
        results = [result(seq(3), seq(4), 1), result(seq(5), seq(6), 1), result(seq(7), seq(8), 1, label=1)]
        assert accuracy_after(results, target) < accuracy_before(results, target)
        assert prob_diff(results, target) > 0

    def test_target_scores_are_filled(self):
        results = [result(ORIGINALS[0], ADVERSARIALS[0], 1)]
        accuracy_after(results, TARGET)
        assert results[0].target_score_before == pytest.approx(0.9)
        assert results[0].target_score_after == pytest.approx(0.3)


class TestDiversity:
    def test_dist_2_fixture(self):
        assert dist_k([seq(3, 4, 3, 4)], 2) == 0.5

    def test_short_sentence_has_no_kgrams(self):
        assert dist_k([seq(3)], 2) == 0.0

    def test_all_unique_bigrams(self):
        assert dist_k([seq(*range(3, 13))], 2) == pytest.approx(0.9)

    def test_ent_2_all_distinct(self):
        assert ent_k([seq(3, 4, 5, 6, 7)], 2) == pytest.approx(math.log(4))

    def test_ent_2_all_identical(self):
        assert ent_k([seq(3, 3, 3, 3)], 2) == 0.0

    def test_ent_ignores_sentence_order(self):
        corpus = [seq(3, 4, 5), seq(4, 5, 4), seq(6, 6)]
        assert ent_k(corpus, 2) == pytest.approx(ent_k(corpus[::-1], 2))

    def test_ent_needs_kgrams(self):
        with pytest.raises(DilmaError):
            ent_k([seq(3)], 2)

    @pytest.mark.parametrize("k", [0, -1])
    def test_k_must_be_positive(self, k: int):
        with pytest.raises(DilmaError):
            dist_k([seq(3, 4)], k)


class TestMultisetJaccard:
    def test_identical(self):
        assert multiset_jaccard(["NOUN", "VERB", "NOUN"], ["NOUN", "VERB", "NOUN"]) == 1.0

    def test_duplicates_count(self):
        assert multiset_jaccard(["NOUN", "VERB"], ["NOUN", "NOUN"]) == pytest.approx(1 / 3)

    def test_disjoint(self):
        assert multiset_jaccard(["ADJ"], ["NOUN"]) == 0.0

    def test_both_empty(self):
        with pytest.raises(DilmaError):
            multiset_jaccard([], [])

    @given(st.lists(st.sampled_from("ABCD"), min_size=1), st.lists(st.sampled_from("ABCD"), min_size=1))
    def test_symmetric_and_bounded(self, a: list[str], b: list[str]):
        value = multiset_jaccard(a, b)
        assert value == multiset_jaccard(b, a)
        assert 0.0 <= value <= 1.0

    def test_tag_files_must_align(self, tmp_path: Path):
        (tmp_path / "a.jsonl").write_text('{"tags": ["NOUN"]}\n{"tags": ["VERB"]}\n', encoding="utf-8")
        (tmp_path / "b.jsonl").write_text('{"tags": ["NOUN"]}\n', encoding="utf-8")
        a, b = read_tag_file(tmp_path / "a.jsonl"), read_tag_file(tmp_path / "b.jsonl")
        assert a == [["NOUN"], ["VERB"]]
        with pytest.raises(DilmaError):
            mean_tag_jaccard(a, b)


class TestEvaluationReport:
    def test_report_fields(self):
        results = [result(ORIGINALS[0], ADVERSARIALS[0], 1), result(ORIGINALS[1], ADVERSARIALS[1], 2)]
        tags = {"pos": ([["NOUN", "VERB"], ["ADJ"]], [["NOUN", "NOUN"], ["ADJ"]])}
        report = evaluate(results, TARGET, tags=tags)
        assert report.n == 2
        assert report.nad == pytest.approx(0.75)
        assert report.accuracy_before == 1.0
        assert report.accuracy_after == 0.0
        assert report.pd == pytest.approx(((0.9 - 0.3) + (0.8 - 0.4)) / 2)
        assert report.mean_wer == 1.5
        assert report.tag_jaccard["pos"] == pytest.approx((1 / 3 + 1.0) / 2)
        assert set(report.dist_k_original) == {1, 2, 3}

    def test_serialization_is_stable(self):
        results = [result(ORIGINALS[0], ADVERSARIALS[0], 1)]
        text = evaluate(results, TARGET).to_json()
        assert text == evaluate(results, TARGET).to_json()
        document = json.loads(text)
        assert list(document) == sorted(document)
        assert document["metadata"]["ent_k_log_base"] == "e"

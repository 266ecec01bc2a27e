import numpy as np
import pytest
import torch
import torch.nn.functional as F

from dilma.attack import AttackResult
from dilma.classifiers import ClassifierConfig
from dilma.defense import (
    DetectionExample,
    DetectionLabel,
    DetectionSet,
    DiscriminatorConfig,
    adversarial_examples,
    adversarial_retrain,
    build_detection_set,
    detection_roc_auc,
    retrain_report,
    train_discriminator,
)
from dilma.errors import DilmaError, DilmaErrorCodes
from dilma.layers import pad_sequences
from dilma.textcore import LabeledExample, TokenSequence


def distinct_sequences(n: int, tokens: range, length: int, seed: int) -> list[TokenSequence]:
    rng = np.random.default_rng(seed)
    found: dict[TokenSequence, None] = {}
    while len(found) < n:
        found[TokenSequence(tuple(int(t) for t in rng.choice(tokens, size=length)))] = None
    return list(found)


class TestDetectionSet:
    @pytest.fixture
    def originals(self) -> list[TokenSequence]:
        return distinct_sequences(30, range(4, 10), 5, seed=0)

    @pytest.fixture
    def adversarials(self) -> list[TokenSequence]:
        return distinct_sequences(30, range(10, 15), 5, seed=1)

    def test_balanced_with_held_out_slice(self, originals, adversarials):
        detection_set = build_detection_set(originals, adversarials, 20, np.random.default_rng(0))
        labels = [e.label for e in detection_set.examples]
        assert labels.count(DetectionLabel.ORIGINAL) == labels.count(DetectionLabel.ADVERSARIAL) == 10
        assert sorted(e.label for e in detection_set.validation) == [DetectionLabel.ORIGINAL, DetectionLabel.ADVERSARIAL]
        assert [e.label for e in detection_set.test].count(DetectionLabel.ADVERSARIAL) == 2
        assert len(detection_set.test) == 4
        assert len(detection_set.train) == 14

    def test_slices_are_disjoint(self, originals, adversarials):
        detection_set = build_detection_set(originals, adversarials, 40, np.random.default_rng(0))
        train, validation, test = (
            {e.sequence for e in part} for part in (detection_set.train, detection_set.validation, detection_set.test)
        )
        assert not train & test
        assert not validation & test
        assert not train & validation

    def test_odd_size_favours_originals(self, originals, adversarials):
        detection_set = build_detection_set(originals, adversarials, 9, np.random.default_rng(0))
        labels = [e.label for e in detection_set.examples]
        assert labels.count(DetectionLabel.ORIGINAL) == 5
        assert labels.count(DetectionLabel.ADVERSARIAL) == 4

    def test_sequences_on_both_sides_are_dropped(self, originals, adversarials):
        shared = originals[:5]
        detection_set = build_detection_set(originals, [*shared, *adversarials], 40, np.random.default_rng(0))
        sequences = [e.sequence for e in detection_set.examples]
        assert not set(shared) & set(sequences)
        assert len(sequences) == len(set(sequences))

    def test_deterministic_for_a_seed(self, originals, adversarials):
        first = build_detection_set(originals, adversarials, 20, np.random.default_rng(3))
        second = build_detection_set(originals, adversarials, 20, np.random.default_rng(3))
        assert first == second

    def test_not_enough_material(self, originals, adversarials):
        with pytest.raises(DilmaError) as info:
            build_detection_set(originals, adversarials[:4], 20, np.random.default_rng(0))
        assert info.value.error_id == DilmaErrorCodes.INSUFFICIENT_DATA

    def test_too_small(self, originals, adversarials):
        with pytest.raises(DilmaError):
            build_detection_set(originals, adversarials, 5, np.random.default_rng(0))


class TestDiscriminator:
    @pytest.fixture
    def config(self) -> DiscriminatorConfig:
        return DiscriminatorConfig(
            embedding_dim=8, hidden=8, dropout=0.0, max_length=16, max_epochs=20, patience=5, batch_size=16, learning_rate=1e-2
        )

    @pytest.fixture
    def detection_set(self) -> DetectionSet:
        originals = distinct_sequences(100, range(4, 10), 5, seed=0)
        adversarials = distinct_sequences(100, range(10, 15), 5, seed=1)
        return build_detection_set(originals, adversarials, 200, np.random.default_rng(0))

    def test_separable_attack_is_detected(self, detection_set, config, tiny_vocab):
        discriminator = train_discriminator(detection_set, config, seed=0, vocab_size=tiny_vocab.size)
        held_out = [
            *(DetectionExample(s, DetectionLabel.ORIGINAL) for s in distinct_sequences(20, range(4, 10), 6, seed=7)),
            *(DetectionExample(s, DetectionLabel.ADVERSARIAL) for s in distinct_sequences(20, range(10, 15), 6, seed=8)),
        ]
        assert detection_roc_auc(discriminator, held_out) >= 0.95

    def test_best_epoch_weights_are_kept(self, detection_set, config, tiny_vocab):
        discriminator = train_discriminator(detection_set, config, seed=0, vocab_size=tiny_vocab.size)
        assert 1 <= len(discriminator.epoch_losses) <= config.max_epochs
        ids, padding_mask = pad_sequences([e.sequence for e in detection_set.validation])
        labels = torch.tensor([int(e.label) for e in detection_set.validation])
        with torch.no_grad():
            validation_loss = F.nll_loss(F.log_softmax(discriminator(ids, padding_mask), dim=-1), labels).item()
        assert validation_loss == pytest.approx(min(discriminator.epoch_losses), rel=1e-5, abs=1e-7)

    def test_label_noise_is_not_detectable_on_the_test_slice(self, config, tiny_vocab):
        pool = distinct_sequences(2_400, range(3, 15), 6, seed=4)
        order = np.random.default_rng(5).permutation(len(pool))
        originals = [pool[i] for i in order[:1_200]]
        adversarials = [pool[i] for i in order[1_200:]]
        noisy = build_detection_set(originals, adversarials, 2_000, np.random.default_rng(0))
        short = config.model_copy(update={"max_epochs": 5})
        discriminator = train_discriminator(noisy, short, seed=0, vocab_size=tiny_vocab.size)
        assert len(noisy.test) == 400
        assert abs(detection_roc_auc(discriminator, noisy.test) - 0.5) <= 0.1

    def test_single_label_validation(self, detection_set, config, tiny_vocab):
        one_sided = [e for e in detection_set.validation if e.label == DetectionLabel.ORIGINAL]
        broken = DetectionSet(train=detection_set.train, validation=one_sided, test=detection_set.test)
        with pytest.raises(DilmaError) as info:
            train_discriminator(broken, config, seed=0, vocab_size=tiny_vocab.size)
        assert info.value.error_id == DilmaErrorCodes.INSUFFICIENT_DATA


class FixedTarget:
    def __init__(self, probs: list[float]) -> None:
        self.probs = probs

    def predict_proba(self, sequences):
        return np.array([self.probs for _ in sequences], dtype=np.float64)


def attack_result(ids: tuple[int, ...], adversarial: tuple[int, ...], label: int) -> AttackResult:
    return AttackResult(
        original=LabeledExample(TokenSequence(ids), label, ""),
        adversarial=TokenSequence(adversarial),
        wer=sum(a != b for a, b in zip(ids, adversarial, strict=True)),
        substitute_score_before=0.9,
        substitute_score_after=0.4,
        attack_name="dilma",
        seed=0,
    )


class TestRetraining:
    @pytest.fixture
    def results(self) -> list[AttackResult]:
        return [
            attack_result((4, 5, 6), (4, 12, 6), 0),
            attack_result((7, 8, 9), (13, 8, 9), 1),
            attack_result((4, 4, 5), (4, 4, 14), 0),
        ]

    def test_adversarials_keep_gold_labels(self, results):
        examples = adversarial_examples(results, limit=2)
        assert [e.sequence for e in examples] == [results[0].adversarial, results[1].adversarial]
        assert [e.label for e in examples] == [0, 1]

    def test_needs_adversarials(self, tiny_vocab):
        config = ClassifierConfig.substitute_defaults(embedding_dim=4, hidden=4, batch_size=2)
        with pytest.raises(DilmaError) as info:
            adversarial_retrain([], [], config, 0, vocab_size=tiny_vocab.size, num_classes=2)
        assert info.value.error_id == DilmaErrorCodes.NO_RESULTS

    def test_retrained_model_and_report(self, results, tiny_vocab):
        clean = [LabeledExample(TokenSequence((4 + i % 6, 5)), i % 2, "") for i in range(8)]
        config = ClassifierConfig.substitute_defaults(embedding_dim=4, hidden=4, batch_size=4, epochs=1, max_length=16)
        retrained = adversarial_retrain(clean, results, config, 0, vocab_size=tiny_vocab.size, num_classes=2)
        assert retrained.num_classes == 2

        original = FixedTarget([0.8, 0.2])
        report = retrain_report(results, original, FixedTarget([0.8, 0.2]), clean)
        assert report.nad_before == report.nad_after == 0.0
        assert report.n_adversarial == 3
        assert report.clean_accuracy_before == 0.5
        assert report.adversarial_accuracy_after == pytest.approx(2 / 3)
        assert report.attack_name == "dilma"

"""Attack and defense trends on the synthetic marker task; the slowest part of the suite."""

import pytest

from dilma.attack import AttackConfig, AttackResult, AttackVariant, attack_many
from dilma.classifiers import BlackBoxClassifier, ClassifierConfig
from dilma.defense import adversarial_retrain, retrain_report
from dilma.metrics import accuracy_after, accuracy_before, attack_success_rate, nad

pytestmark = pytest.mark.integration

ATTACKED = 200
LOSS_TREND_EXAMPLES = 100


@pytest.fixture(scope="module")
def sampling_fool_results(desk, desk_mlm, desk_substitute) -> list[AttackResult]:
    cfg = AttackConfig(variant=AttackVariant.SAMPLING_FOOL, k=20, m=5, tau=1.0, seed=0)
    return attack_many(desk.test[:ATTACKED], desk_mlm, desk_substitute, None, cfg)


@pytest.fixture(scope="module")
def dilma_dl_results(desk, desk_mlm, desk_substitute, desk_deeplev) -> list[AttackResult]:
    cfg = AttackConfig(variant=AttackVariant.DILMA_DL, k=20, m=5, beta=1.0, tau=1.0, learning_rate=1e-2, seed=0)
    return attack_many(desk.test[:ATTACKED], desk_mlm, desk_substitute, desk_deeplev, cfg)


def test_sampling_fool_flips_the_substitute(sampling_fool_results, desk_substitute):
    assert attack_success_rate(sampling_fool_results, BlackBoxClassifier(desk_substitute)) >= 0.1


def test_dilma_loss_goes_down(desk, desk_mlm, desk_substitute):
    cfg = AttackConfig(variant=AttackVariant.DILMA, k=8, m=10, tau=1.0, learning_rate=5e-2, seed=0)
    results = attack_many(desk.test[:LOSS_TREND_EXAMPLES], desk_mlm, desk_substitute, None, cfg)
    decreased = [r.iterations[-1].loss < r.iterations[0].loss for r in results]
    assert sum(decreased) >= 0.6 * len(results)


def test_dilma_dl_transfers_to_the_target(sampling_fool_results, dilma_dl_results, desk_target):
    target = BlackBoxClassifier(desk_target)
    drop = accuracy_before(dilma_dl_results, target) - accuracy_after(dilma_dl_results, target)
    assert drop >= 0.2
    assert nad(dilma_dl_results, target) >= nad(sampling_fool_results, target)


def test_retraining_absorbs_the_adversarials(desk, desk_target, dilma_dl_results):
    config = ClassifierConfig.target_defaults(epochs=20)
    retrained = adversarial_retrain(
        desk.split.target_half, dilma_dl_results, config, 0, vocab_size=desk.vocab.size, num_classes=2
    )
    report = retrain_report(dilma_dl_results, BlackBoxClassifier(desk_target), BlackBoxClassifier(retrained), desk.test)

    assert abs(report.clean_accuracy_after - report.clean_accuracy_before) <= 0.05
    assert report.adversarial_accuracy_after >= 0.7
    assert 0.0 <= report.nad_after <= 1.0

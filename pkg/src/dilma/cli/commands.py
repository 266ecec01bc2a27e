import argparse
from pathlib import Path

import numpy as np

from dilma.attack import AttackResult, AttackVariant, attack_many, read_attack_file, tune_hyperparams, write_attack_file
from dilma.checkpoint import parameter_hash
from dilma.classifiers import BlackBoxClassifier, accuracy, train_substitute, train_target
from dilma.deeplev import evaluate_deeplev, generate_pairs, load_pairs, save_pairs, train_deeplev
from dilma.defense import (
    DetectionReport,
    adversarial_retrain,
    build_detection_set,
    detection_roc_auc,
    retrain_report,
    train_discriminator,
)
from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.lm import masked_recovery_accuracy, pretrain_mlm, visible_top_k_rate
from dilma.logger import get_logger
from dilma.metrics import evaluate, read_tag_file
from dilma.textcore import LabeledExample, TokenSequence, Vocabulary
from dilma.tracking import RunTracker
from dilma.training import derive_seeds

from .workspace import Workspace

logger = get_logger(__name__)

DEEPLEV_HELD_OUT_PAIRS = 5_000


def _tracker(ws: Workspace, subcommand: str) -> RunTracker:
    return RunTracker(subcommand, seed=ws.config.seed, config_hash=ws.config.config_hash())


def _target_training_data(ws: Workspace) -> list[LabeledExample]:
    if ws.config.target_trains_on == "full":
        return ws.data()[0].examples
    return ws.split().target_half


def pretrain(ws: Workspace, _: argparse.Namespace) -> None:
    tracker = _tracker(ws, "pretrain")
    train, test = ws.data()
    tracker.record_input(ws.train_file)
    model = pretrain_mlm([e.sequence for e in train], train.vocab, ws.config.mlm_config(), ws.config.seed)
    held_out = [e.sequence for e in test]
    recovery = masked_recovery_accuracy(model, held_out, train.vocab, ws.config.seed)
    top5 = visible_top_k_rate(model, held_out, k=5)
    ws.save_mlm(model, train.vocab, masked_recovery_accuracy=recovery, visible_top5_rate=top5)
    tracker.artifact_written(ws.mlm_file, masked_recovery_accuracy=recovery, visible_top5_rate=top5)


def train_target_command(ws: Workspace, _: argparse.Namespace) -> None:
    tracker = _tracker(ws, "train-target")
    train, test = ws.data()
    tracker.record_input(ws.train_file)
    model = train_target(
        _target_training_data(ws), train.vocab.size, train.num_classes, ws.config.target_config(), ws.config.seed
    )
    test_accuracy = accuracy(model, test.examples)
    ws.save_classifier(ws.target_file, model, train.vocab, trained_on=ws.config.target_trains_on, test_accuracy=test_accuracy)
    tracker.artifact_written(ws.target_file, test_accuracy=test_accuracy)


def train_substitute_command(ws: Workspace, _: argparse.Namespace) -> None:
    tracker = _tracker(ws, "train-substitute")
    train, test = ws.data()
    tracker.record_input(ws.train_file)
    model = train_substitute(ws.split(), train.vocab.size, train.num_classes, ws.config.substitute_config(), ws.config.seed)
    test_accuracy = accuracy(model, test.examples)
    ws.save_classifier(ws.substitute_file, model, train.vocab, trained_on="substitute_half", test_accuracy=test_accuracy)
    tracker.artifact_written(ws.substitute_file, test_accuracy=test_accuracy)


def train_deeplev_command(ws: Workspace, _: argparse.Namespace) -> None:
    tracker = _tracker(ws, "train-deeplev")
    train, test = ws.data()
    config = ws.config.deeplev_config()
    pool = list(train.vocab.regular_ids)
    train_seed, held_out_seed = derive_seeds(ws.config.seed, 2)

    if ws.pairs_file.exists():
        pairs = load_pairs(ws.pairs_file)
    else:
        rng = np.random.default_rng(train_seed)
        pairs = generate_pairs([e.sequence for e in train], config.n_pairs, rng, pool, config.max_edits)
        save_pairs(pairs, ws.pairs_file)
    tracker.record_input(ws.pairs_file)

    model = train_deeplev(pairs, train.vocab.size, config, ws.config.seed)
    held_out = generate_pairs(
        [e.sequence for e in test], DEEPLEV_HELD_OUT_PAIRS, np.random.default_rng(held_out_seed), pool, config.max_edits
    )
    quality = evaluate_deeplev(model, held_out)
    logger.info("deeplev evaluated", spearman=quality.spearman, identical_mean=quality.identical_mean, mae=quality.mae)
    ws.save_deeplev(model, train.vocab, spearman=quality.spearman, identical_mean=quality.identical_mean)
    tracker.artifact_written(ws.deeplev_file, spearman=quality.spearman, identical_mean=quality.identical_mean)


def attack(ws: Workspace, args: argparse.Namespace) -> None:
    tracker = _tracker(ws, "attack")
    variant = AttackVariant(args.variant) if args.variant else ws.config.attack_variant
    vocab = ws.vocab()
    ws.require(ws.substitute_file, "train-substitute")
    mlm = ws.load_mlm(vocab)
    substitute = ws.load_classifier(ws.substitute_file, vocab, "train-substitute")
    deeplev = ws.load_deeplev(vocab) if variant == AttackVariant.DILMA_DL else None
    for path in (ws.mlm_file, ws.substitute_file, *([ws.deeplev_file] if deeplev is not None else [])):
        tracker.record_input(path)

    mlm_hash = parameter_hash(mlm)
    cfg = ws.config.attack_config(variant)
    if args.tune:
        validation = ws.split().substitute_half[: ws.config.tune_validation_size]
        outcome = tune_hyperparams(
            ws.config.search_space(variant),
            validation,
            ws.config.tune_budget,
            ws.config.seed,
            mlm=mlm,
            substitute=substitute,
            deeplev=deeplev,
            workers=ws.config.attack_workers,
        )
        cfg = outcome.config

    _, test = ws.data()
    examples = test.examples[: ws.config.attack_examples]
    results = attack_many(examples, mlm, substitute, deeplev, cfg, workers=ws.config.attack_workers)
    if parameter_hash(mlm) != mlm_hash:
        raise dilma_error(DilmaErrorCodes.UNEXPECTED_ERROR, "the shared MLM changed during the attack")

    path = ws.attack_file(variant.value)
    write_attack_file(path, results, vocab)
    tracker.artifact_written(path, attack_name=variant.value, examples=len(results), tuned=bool(args.tune))


def _load_results(ws: Workspace, args: argparse.Namespace, vocab: Vocabulary) -> tuple[Path, list[AttackResult]]:
    if args.attack_file is not None:
        path = Path(args.attack_file)
    else:
        variant = AttackVariant(args.variant) if args.variant else ws.config.attack_variant
        path = ws.attack_file(variant.value)
    return path, [AttackResult.from_record(record, vocab) for record in read_attack_file(path)]


def evaluate_command(ws: Workspace, args: argparse.Namespace) -> None:
    """Scores an attack file with the target only; no attacker-side model is loaded."""
    tracker = _tracker(ws, "evaluate")
    vocab = ws.vocab()
    target = ws.load_classifier(ws.target_file, vocab, "train-target")
    path, results = _load_results(ws, args, vocab)
    tracker.record_input(path)

    tags = {}
    for name, original_file, adversarial_file in args.tags or []:
        tags[name] = (read_tag_file(Path(original_file)), read_tag_file(Path(adversarial_file)))
        tracker.record_input(Path(original_file))
        tracker.record_input(Path(adversarial_file))

    report = evaluate(results, BlackBoxClassifier(target), tags=tags)
    out = ws.report_file("evaluation", report.attack_name)
    report.write(out)
    tracker.artifact_written(out, nad=report.nad, accuracy_after=report.accuracy_after)


def defend(ws: Workspace, args: argparse.Namespace) -> None:
    tracker = _tracker(ws, "defend")
    train, test = ws.data()
    target = ws.load_classifier(ws.target_file, train.vocab, "train-target")
    path, results = _load_results(ws, args, train.vocab)
    tracker.record_input(path)

    retrained = adversarial_retrain(
        _target_training_data(ws),
        results,
        ws.config.target_config(),
        ws.config.seed,
        vocab_size=train.vocab.size,
        num_classes=train.num_classes,
    )
    attack_name = results[0].attack_name
    checkpoint = ws.root / f"target-retrained-{attack_name}.pt"
    ws.save_classifier(checkpoint, retrained, train.vocab, trained_on=f"{ws.config.target_trains_on}+{attack_name}")
    tracker.artifact_written(checkpoint, attack_name=attack_name)

    report = retrain_report(results, BlackBoxClassifier(target), BlackBoxClassifier(retrained), test.examples)
    out = ws.report_file("retrain", attack_name)
    report.write(out)
    tracker.artifact_written(out, nad_before=report.nad_before, nad_after=report.nad_after)


def _usable_detection_size(requested: int, originals: list[TokenSequence], adversarials: list[TokenSequence]) -> int:
    shared = set(originals) & set(adversarials)
    available = 2 * min(len(set(originals) - shared), len(set(adversarials) - shared))
    if available < requested:
        logger.warning("detection set clamped to available material", requested=requested, available=available)
    return min(requested, available)


def detect(ws: Workspace, args: argparse.Namespace) -> None:
    tracker = _tracker(ws, "detect")
    vocab = ws.vocab()
    path, results = _load_results(ws, args, vocab)
    tracker.record_input(path)

    originals = [r.original.sequence for r in results]
    adversarials = [r.adversarial for r in results]
    n = _usable_detection_size(ws.config.detection_size, originals, adversarials)
    detection_set = build_detection_set(originals, adversarials, n, np.random.default_rng(ws.config.seed))
    discriminator = train_discriminator(
        detection_set, ws.config.discriminator_config(), ws.config.seed, vocab_size=vocab.size
    )

    report = DetectionReport(
        roc_auc=detection_roc_auc(discriminator, detection_set.test),
        n=n,
        attack_name=results[0].attack_name,
        validation_size=len(detection_set.validation),
        test_size=len(detection_set.test),
        epochs_run=len(discriminator.epoch_losses),
    )
    out = ws.report_file("detection", report.attack_name)
    report.write(out)
    tracker.artifact_written(out, roc_auc=report.roc_auc)

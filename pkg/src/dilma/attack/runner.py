import contextvars
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import torch

from dilma.classifiers import Classifier, predict_proba_batch
from dilma.deeplev import DeepLevenshtein
from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.lm import MaskedLanguageModel, clone_params
from dilma.logger import get_logger
from dilma.sampler import sample_categorical, temperature_softmax
from dilma.textcore import LabeledExample, TokenSequence, wer
from dilma.training import derive_seeds

from .config import AttackConfig, AttackVariant
from .objective import DilmaObjective
from .result import AttackResult, CandidateRecord, IterationRecord
from .selection import select_candidate

logger = get_logger(__name__)


def _generators(seed: int) -> tuple[torch.Generator, torch.Generator]:
    """Separate streams for logged candidates and Gumbel noise, so both attacks share candidate draws."""
    candidate_seed, noise_seed = derive_seeds(seed, 2)
    return torch.Generator().manual_seed(candidate_seed), torch.Generator().manual_seed(noise_seed)


def _check_shared_vocabulary(x: TokenSequence, *models: torch.nn.Module | None) -> None:
    sizes = {int(model.vocab_size) for model in models if model is not None}
    if len(sizes) != 1:
        raise dilma_error(DilmaErrorCodes.VOCABULARY_MISMATCH, f"models disagree on vocabulary size: {sorted(sizes)}")
    if max(x.ids) >= sizes.pop():
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "sequence holds ids outside the shared vocabulary")


def _log_candidates(
    candidates: list[TokenSequence], iteration: int, x: LabeledExample, substitute: Classifier
) -> list[CandidateRecord]:
    probs = predict_proba_batch(substitute, candidates)
    return [
        CandidateRecord(
            sequence=candidate,
            iteration=iteration,
            order=order,
            true_class_score=float(probs[order, x.label]),
            flipped=int(probs[order].argmax()) != x.label,
            wer=wer(x.sequence, candidate),
        )
        for order, candidate in enumerate(candidates)
    ]


def _finish(
    x: LabeledExample,
    substitute: Classifier,
    cfg: AttackConfig,
    candidates: list[CandidateRecord],
    iterations: list[IterationRecord],
) -> AttackResult:
    selection = select_candidate(candidates, x.sequence)
    before, after = predict_proba_batch(substitute, [x.sequence, selection.sequence])[:, x.label]
    return AttackResult(
        original=x,
        adversarial=selection.sequence,
        wer=wer(x.sequence, selection.sequence),
        substitute_score_before=float(before),
        substitute_score_after=float(after),
        attack_name=cfg.variant.value,
        seed=cfg.seed,
        iterations_run=len(iterations),
        failed=selection.failed,
        candidates=candidates,
        iterations=iterations,
    )


def sampling_fool(x: LabeledExample, mlm: MaskedLanguageModel, substitute: Classifier, cfg: AttackConfig) -> AttackResult:
    """k * m draws from the temperature softmax of the pretrained MLM, without any parameter update."""
    _check_shared_vocabulary(x.sequence, mlm, substitute)
    candidate_generator, _ = _generators(cfg.seed)

    mlm.eval()
    with torch.no_grad():
        probs = temperature_softmax(mlm(x.sequence.as_tensor().unsqueeze(0))[0], cfg.tau)

    candidates: list[CandidateRecord] = []
    for iteration in range(1, cfg.k + 1):
        drawn = sample_categorical(probs, cfg.m, candidate_generator)
        candidates.extend(_log_candidates(drawn, iteration, x, substitute))

    return _finish(x, substitute, cfg, candidates, [])


def dilma_attack(
    x: LabeledExample,
    mlm: MaskedLanguageModel,
    substitute: Classifier,
    deeplev: DeepLevenshtein | None,
    cfg: AttackConfig,
) -> AttackResult:
    """
    Fine-tune a private clone of the MLM against the attack loss for k iterations.

    Each iteration: logits from the current parameters, m straight-through Gumbel
    samples, loss averaged over the samples, one plain gradient step on the chosen
    parameter subset, then m candidates drawn from the temperature softmax of the
    updated model. A non-finite loss ends the loop; selection runs on what was logged.
    """
    if cfg.variant == AttackVariant.SAMPLING_FOOL:
        raise dilma_error(DilmaErrorCodes.INVALID_CONFIG, "use sampling_fool for the sampling_fool variant")
    if (deeplev is not None) != (cfg.variant == AttackVariant.DILMA_DL):
        raise dilma_error(DilmaErrorCodes.INVALID_CONFIG, "a Deep Levenshtein model is required exactly for dilma_dl")
    return run_dilma(x, mlm, substitute, deeplev, cfg)


def run_dilma(
    x: LabeledExample,
    mlm: MaskedLanguageModel,
    substitute: Classifier,
    deeplev: DeepLevenshtein | None,
    cfg: AttackConfig,
    *,
    model: MaskedLanguageModel | None = None,
) -> AttackResult:
    """
    The attack loop without variant checks; with beta = 0 a given Deep Levenshtein model is never consulted.

    `model` is fine-tuned in place when given, otherwise a private clone of `mlm` is.
    """
    _check_shared_vocabulary(x.sequence, mlm, substitute, deeplev)
    candidate_generator, noise_generator = _generators(cfg.seed)

    model = clone_params(mlm) if model is None else model
    parameters = model.trainable_parameters(cfg.parameter_subset)
    for parameter in parameters:
        parameter.requires_grad_(True)
    objective = DilmaObjective(model, substitute, deeplev, x.sequence, x.label, beta=cfg.beta, tau=cfg.tau, m=cfg.m)
    substitute.eval()
    if deeplev is not None:
        deeplev.eval()

    x_ids = x.sequence.as_tensor().unsqueeze(0)
    candidates: list[CandidateRecord] = []
    iterations: list[IterationRecord] = []
    for iteration in range(1, cfg.k + 1):
        value = objective.evaluate(objective.sample(noise_generator, zero_noise=cfg.zero_noise))
        loss = float(value.loss.detach())
        if not math.isfinite(loss):
            iterations.append(IterationRecord(iteration=iteration, loss=loss, clamped=value.clamped, aborted=True))
            logger.warning("non-finite attack loss", iteration=iteration, seed=cfg.seed)
            break

        # autograd.grad leaves .grad of the shared substitute and Deep Levenshtein models untouched.
        gradients = torch.autograd.grad(value.loss, parameters, allow_unused=True)
        with torch.no_grad():
            for parameter, gradient in zip(parameters, gradients, strict=True):
                if gradient is not None:
                    parameter.sub_(cfg.learning_rate * gradient)
        iterations.append(IterationRecord(iteration=iteration, loss=loss, clamped=value.clamped))

        with torch.no_grad():
            probs = temperature_softmax(model(x_ids)[0], cfg.tau)
        drawn = sample_categorical(probs, cfg.m, candidate_generator)
        candidates.extend(_log_candidates(drawn, iteration, x, substitute))

    logger.debug(
        "attack finished",
        variant=cfg.variant.value,
        seed=cfg.seed,
        first_loss=iterations[0].loss if iterations else None,
        last_loss=iterations[-1].loss if iterations else None,
    )
    return _finish(x, substitute, cfg, candidates, iterations)


def _unattackable(x: LabeledExample, mlm: MaskedLanguageModel, substitute: Classifier, cfg: AttackConfig) -> AttackResult:
    _check_shared_vocabulary(x.sequence, mlm, substitute)
    logger.warning(
        "input exceeds the language model's length; left unattacked",
        length=len(x.sequence),
        max_length=mlm.config.max_length,
        seed=cfg.seed,
    )
    return _finish(x, substitute, cfg, [], [])


def run_attack(
    x: LabeledExample,
    mlm: MaskedLanguageModel,
    substitute: Classifier,
    deeplev: DeepLevenshtein | None,
    cfg: AttackConfig,
) -> AttackResult:
    """Dispatch on the variant. Inputs longer than the MLM can read come back unattacked and marked failed."""
    if len(x.sequence) > mlm.config.max_length:
        return _unattackable(x, mlm, substitute, cfg)
    if cfg.variant == AttackVariant.SAMPLING_FOOL:
        return sampling_fool(x, mlm, substitute, cfg)
    return dilma_attack(x, mlm, substitute, deeplev if cfg.variant == AttackVariant.DILMA_DL else None, cfg)


def attack_many(
    examples: Sequence[LabeledExample],
    mlm: MaskedLanguageModel,
    substitute: Classifier,
    deeplev: DeepLevenshtein | None,
    cfg: AttackConfig,
    workers: int = 1,
) -> list[AttackResult]:
    """Attack every example with seed cfg.seed + index; results keep input order."""

    def attack_one(index: int) -> AttackResult:
        return run_attack(examples[index], mlm, substitute, deeplev, cfg.for_example(index))

    if workers <= 1:
        results = [attack_one(i) for i in range(len(examples))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(contextvars.copy_context().run, attack_one, i) for i in range(len(examples))]
            results = [future.result() for future in futures]

    flipped = np.mean([r.substitute_score_after < r.substitute_score_before for r in results]) if results else 0.0
    logger.info("attacks finished", variant=cfg.variant.value, examples=len(results), score_dropped=float(flipped))
    return results

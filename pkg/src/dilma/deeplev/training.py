from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from scipy.stats import spearmanr

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.layers import pad_sequences
from dilma.logger import get_logger
from dilma.sampler import RelaxedSequence
from dilma.textcore import TokenSequence
from dilma.training import batch_indices, require_one_batch

from .model import DeepLevConfig, DeepLevenshtein
from .pairs import EditPair

logger = get_logger(__name__)

MIN_TRAINING_PAIRS = 1_000


def train_deeplev(pairs: Sequence[EditPair], vocab_size: int, config: DeepLevConfig, seed: int) -> DeepLevenshtein:
    """Fit encoder and head with squared error against the exact WER labels."""
    require_one_batch(len(pairs), config.batch_size, "edit-pair set")
    if len(pairs) < MIN_TRAINING_PAIRS:
        raise dilma_error(
            DilmaErrorCodes.INSUFFICIENT_DATA, f"{len(pairs)} pairs given, at least {MIN_TRAINING_PAIRS} needed"
        )

    torch.manual_seed(seed)
    model = DeepLevenshtein(vocab_size, config)
    generator = torch.Generator().manual_seed(seed)
    targets = torch.tensor([float(pair.true_wer) for pair in pairs])

    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    model.train()
    for epoch in range(config.epochs):
        total, batches = 0.0, 0
        for batch in batch_indices(len(pairs), config.batch_size, generator):
            a_ids, a_mask = pad_sequences([pairs[i].a for i in batch])
            b_ids, b_mask = pad_sequences([pairs[i].b for i in batch])
            loss = F.mse_loss(model(a_ids, b_ids, a_mask, b_mask), targets[batch])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item()
            batches += 1
        model.epoch_losses.append(total / batches)
        logger.info("epoch finished", model="deeplev", epoch=epoch + 1, loss=round(total / batches, 4))

    model.eval()
    return model


def dl_distance(
    model: DeepLevenshtein, candidate: TokenSequence | RelaxedSequence, reference: TokenSequence
) -> torch.Tensor:
    """Estimated WER between candidate and reference, clamped at 0; differentiable in relaxed rows."""
    model.eval()
    ref = reference.as_tensor().unsqueeze(0)
    if isinstance(candidate, TokenSequence):
        with torch.no_grad():
            return model(candidate.as_tensor().unsqueeze(0), ref)[0].clamp(min=0.0)

    rows = candidate.rows
    if rows.dim() != 2 or rows.shape[-1] != model.vocab_size:
        raise dilma_error(
            DilmaErrorCodes.INVALID_INPUT,
            f"relaxed rows of shape {tuple(rows.shape)} do not match vocabulary size {model.vocab_size}",
        )
    return model(rows.unsqueeze(0), ref)[0].clamp(min=0.0)


def predict_pairs(model: DeepLevenshtein, pairs: Sequence[EditPair], batch_size: int = 512) -> np.ndarray:
    model.eval()
    predictions: list[np.ndarray] = []
    with torch.no_grad():
        for batch in batch_indices(len(pairs), batch_size):
            a_ids, a_mask = pad_sequences([pairs[i].a for i in batch])
            b_ids, b_mask = pad_sequences([pairs[i].b for i in batch])
            predictions.append(model(a_ids, b_ids, a_mask, b_mask).clamp(min=0.0).double().numpy())
    return np.concatenate(predictions) if predictions else np.zeros(0)


@dataclass(slots=True)
class DeepLevEvaluation:
    spearman: float
    identical_mean: float
    group_means: dict[int, float]
    mae: float


def evaluate_deeplev(model: DeepLevenshtein, pairs: Sequence[EditPair]) -> DeepLevEvaluation:
    predictions = predict_pairs(model, pairs)
    truth = np.array([pair.true_wer for pair in pairs], dtype=float)
    identical = truth == 0
    group_means = {int(w): float(predictions[truth == w].mean()) for w in np.unique(truth)}
    return DeepLevEvaluation(
        spearman=float(spearmanr(predictions, truth).statistic),
        identical_mean=float(predictions[identical].mean()) if identical.any() else float("nan"),
        group_means=group_means,
        mae=float(np.abs(predictions - truth).mean()),
    )

import copy
from collections.abc import Sequence

import torch
import torch.nn.functional as F

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.layers import pad_sequences
from dilma.logger import get_logger
from dilma.textcore import TokenSequence, Vocabulary
from dilma.training import batch_indices, require_one_batch

from .model import MaskedLanguageModel, MLMConfig

logger = get_logger(__name__)

IGNORE_INDEX = -100

type MLMParams = MaskedLanguageModel
type LogitMatrix = torch.Tensor


def mask_tokens(
    ids: torch.Tensor,
    padding_mask: torch.Tensor,
    vocab: Vocabulary,
    config: MLMConfig,
    generator: torch.Generator,
) -> tuple[torch.Tensor, torch.Tensor]:
    """
    BERT-style corruption of a padded batch.

    Selects `mask_fraction` of the real positions (at least one per row). Of those,
    `mask_token_share` become MASK, `random_token_share` a random regular token and
    the rest stay unchanged. Returns corrupted inputs and labels with IGNORE_INDEX
    outside the selection.
    """
    scores = torch.rand(ids.shape, generator=generator)
    selected = (scores < config.mask_fraction) & ~padding_mask

    # Rows that drew no position get their highest-scoring real position.
    fallback = scores.masked_fill(padding_mask, -1.0).argmax(dim=1)
    empty_rows = ~selected.any(dim=1)
    selected[empty_rows, fallback[empty_rows]] = True

    labels = ids.masked_fill(~selected, IGNORE_INDEX)

    action = torch.rand(ids.shape, generator=generator)
    to_mask = selected & (action < config.mask_token_share)
    to_random = selected & (action >= config.mask_token_share) & (
        action < config.mask_token_share + config.random_token_share
    )

    regular = vocab.regular_ids
    random_tokens = torch.randint(regular.start, regular.stop, ids.shape, generator=generator)

    inputs = ids.clone()
    inputs[to_mask] = vocab.mask_id
    inputs[to_random] = random_tokens[to_random]
    return inputs, labels


def pretrain_mlm(
    corpus: Sequence[TokenSequence], vocab: Vocabulary, config: MLMConfig, seed: int
) -> MaskedLanguageModel:
    """Pretrain an MLM from scratch with masked-token prediction. Deterministic for a fixed seed."""
    if not corpus:
        raise dilma_error(DilmaErrorCodes.EMPTY_DATASET, "pretraining corpus is empty")
    require_one_batch(len(corpus), config.batch_size, "pretraining corpus")
    if len(vocab.regular_ids) == 0:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "vocabulary has no regular tokens")

    torch.manual_seed(seed)
    model = MaskedLanguageModel(vocab.size, config)
    generator = torch.Generator().manual_seed(seed)
    sequences = [TokenSequence(s.ids[: config.max_length]) for s in corpus]

    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    model.train()
    for epoch in range(config.epochs):
        total, batches = 0.0, 0
        for batch in batch_indices(len(sequences), config.batch_size, generator):
            ids, padding_mask = pad_sequences([sequences[i] for i in batch], vocab.pad_id)
            inputs, labels = mask_tokens(ids, padding_mask, vocab, config, generator)
            logits = model(inputs, padding_mask)
            loss = F.cross_entropy(logits.reshape(-1, vocab.size), labels.reshape(-1), ignore_index=IGNORE_INDEX)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item()
            batches += 1
        epoch_loss = total / batches
        model.epoch_losses.append(epoch_loss)
        logger.info("epoch finished", model="mlm", epoch=epoch + 1, loss=round(epoch_loss, 4))

    model.eval()
    return model


def lm_logits(params: MLMParams, x: TokenSequence) -> LogitMatrix:
    """Per-position logits ``(t, d)`` for the unmasked sequence."""
    params.eval()
    with torch.no_grad():
        return params(x.as_tensor().unsqueeze(0))[0]


def clone_params(params: MLMParams) -> MLMParams:
    clone = copy.deepcopy(params)
    clone.eval()
    return clone

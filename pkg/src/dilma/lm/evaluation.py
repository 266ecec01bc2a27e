from collections.abc import Sequence

import torch

from dilma.textcore import TokenSequence, Vocabulary

from .model import MaskedLanguageModel


def masked_recovery_accuracy(
    model: MaskedLanguageModel, sequences: Sequence[TokenSequence], vocab: Vocabulary, seed: int = 0
) -> float:
    """Top-1 accuracy at one randomly masked position per sentence."""
    generator = torch.Generator().manual_seed(seed)
    hits = 0
    model.eval()
    with torch.no_grad():
        for sequence in sequences:
            ids = sequence.as_tensor()[: model.config.max_length].unsqueeze(0)
            position = int(torch.randint(ids.shape[1], (1,), generator=generator))
            true_id = int(ids[0, position])
            ids[0, position] = vocab.mask_id
            hits += int(model(ids)[0, position].argmax()) == true_id
    return hits / len(sequences)


def visible_top_k_rate(model: MaskedLanguageModel, sequences: Sequence[TokenSequence], k: int = 5) -> float:
    """Share of positions whose true token is among the top-k logits of the unmasked sequence."""
    hits = total = 0
    model.eval()
    with torch.no_grad():
        for sequence in sequences:
            ids = sequence.as_tensor()[: model.config.max_length].unsqueeze(0)
            top = model(ids)[0].topk(k, dim=-1).indices
            hits += int((top == ids[0].unsqueeze(-1)).any(dim=-1).sum())
            total += ids.shape[1]
    return hits / total

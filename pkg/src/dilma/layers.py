"""Building blocks shared by every model that reads token sequences.

All models accept either hard ids (LongTensor ``(B, t)``) or relaxed rows
(FloatTensor ``(B, t, d)``). Relaxed rows are embedded as ``rows @ E``, which
equals the lookup ``E[ids]`` exactly for one-hot rows.
"""

from collections.abc import Sequence

import torch
from torch import nn

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.textcore import TokenSequence


def is_relaxed(inputs: torch.Tensor) -> bool:
    return inputs.is_floating_point()


def embed_tokens(embedding: nn.Embedding, inputs: torch.Tensor) -> torch.Tensor:
    if not is_relaxed(inputs):
        return embedding(inputs)
    if inputs.shape[-1] != embedding.num_embeddings:
        raise dilma_error(
            DilmaErrorCodes.INVALID_INPUT,
            f"relaxed rows have {inputs.shape[-1]} columns, vocabulary has {embedding.num_embeddings}",
        )
    return inputs @ embedding.weight


def truncate_sequences(sequences: Sequence[TokenSequence], max_length: int) -> list[TokenSequence]:
    """Keep the first `max_length` tokens of each sequence, as every model is trained on."""
    return [s if len(s) <= max_length else TokenSequence(s.ids[:max_length]) for s in sequences]


def pad_sequences(sequences: Sequence[TokenSequence], pad_id: int = 0) -> tuple[torch.Tensor, torch.Tensor]:
    """Right-pad to the longest sequence. Returns ids ``(B, t)`` and a padding mask, True at pads."""
    length = max(len(s) for s in sequences)
    ids = torch.full((len(sequences), length), pad_id, dtype=torch.long)
    for row, sequence in enumerate(sequences):
        ids[row, : len(sequence)] = sequence.as_tensor()
    lengths = torch.tensor([len(s) for s in sequences])
    padding_mask = torch.arange(length).unsqueeze(0) >= lengths.unsqueeze(1)
    return ids, padding_mask


def masked_mean(states: torch.Tensor, padding_mask: torch.Tensor | None) -> torch.Tensor:
    """Mean over the time axis of ``(B, t, h)`` states, ignoring padded steps."""
    if padding_mask is None:
        return states.mean(dim=1)
    keep = (~padding_mask).unsqueeze(-1).to(states.dtype)
    return (states * keep).sum(dim=1) / keep.sum(dim=1).clamp(min=1.0)


def sequence_length(inputs: torch.Tensor) -> int:
    return inputs.shape[1]


def check_max_length(inputs: torch.Tensor, max_length: int) -> None:
    if sequence_length(inputs) > max_length:
        raise dilma_error(
            DilmaErrorCodes.INVALID_INPUT,
            f"sequence length {sequence_length(inputs)} exceeds the model's maximum of {max_length} positions",
        )

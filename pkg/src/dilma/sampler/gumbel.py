"""Temperature softmax and the Straight-Through Gumbel estimator.

Both accept logits of shape ``(..., t, d)``; sampling happens independently
per row.
"""

from dataclasses import dataclass

import torch
import torch.nn.functional as F

from dilma.errors import DilmaErrorCodes, dilma_error
from dilma.textcore import TokenSequence

UNIFORM_CLAMP = 1e-10


def _check_tau(tau: float) -> None:
    if not tau > 0:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, f"temperature must be positive, got {tau}")


def temperature_softmax(logits: torch.Tensor, tau: float) -> torch.Tensor:
    _check_tau(tau)
    scaled = logits / tau
    scaled = scaled - scaled.max(dim=-1, keepdim=True).values
    weights = scaled.exp()
    return weights / weights.sum(dim=-1, keepdim=True)


def sample_gumbel(shape: torch.Size, generator: torch.Generator | None, dtype: torch.dtype) -> torch.Tensor:
    """Gumbel(0, 1) noise as -log(-log(u)) with u clamped away from 0 and 1."""
    u = torch.rand(shape, generator=generator, dtype=dtype)
    u = u.clamp(UNIFORM_CLAMP, 1.0 - UNIFORM_CLAMP)
    return -torch.log(-torch.log(u))


@dataclass(slots=True)
class RelaxedSequence:
    """
    A Gumbel-softmax sample.

    `rows` are the soft rows that carry gradients. `straight_through` has the
    hard one-hot values in the forward pass and the gradient of `rows` in the
    backward pass. `hard_index` holds the argmax ids with the leading shape of
    `rows` minus the vocabulary axis.
    """

    rows: torch.Tensor
    straight_through: torch.Tensor
    hard_index: torch.Tensor
    tau: float

    @classmethod
    def from_rows(cls, rows: torch.Tensor, tau: float = 1.0) -> "RelaxedSequence":
        """Wrap arbitrary relaxed rows, e.g. a one-hot encoding or a test fixture."""
        hard_index = rows.argmax(dim=-1)
        one_hot = F.one_hot(hard_index, rows.shape[-1]).to(rows.dtype)
        return cls(rows=rows, straight_through=(one_hot - rows).detach() + rows, hard_index=hard_index, tau=tau)

    @classmethod
    def one_hot(cls, sequence: TokenSequence, vocab_size: int, dtype: torch.dtype = torch.float32) -> "RelaxedSequence":
        return cls.from_rows(F.one_hot(sequence.as_tensor(), vocab_size).to(dtype))

    @property
    def hard_ids(self) -> TokenSequence:
        if self.hard_index.dim() != 1:
            raise dilma_error(DilmaErrorCodes.INVALID_INPUT, "hard_ids needs a single sequence; use sequences()")
        return TokenSequence(tuple(self.hard_index.tolist()))

    def sequences(self) -> list[TokenSequence]:
        flat = self.hard_index.reshape(-1, self.hard_index.shape[-1])
        return [TokenSequence(tuple(row)) for row in flat.tolist()]


def gumbel_st_sample(
    logits: torch.Tensor,
    tau: float,
    generator: torch.Generator | None = None,
    *,
    zero_noise: bool = False,
    noise: torch.Tensor | None = None,
) -> RelaxedSequence:
    """
    Straight-Through Gumbel sample from per-position logits.

    `zero_noise` forces the noise to 0 and `noise` supplies it explicitly; both are
    hooks for deterministic checks.
    """
    _check_tau(tau)
    if noise is None:
        noise = torch.zeros_like(logits) if zero_noise else sample_gumbel(logits.shape, generator, logits.dtype)
    soft = temperature_softmax(logits + noise, tau)
    hard_index = soft.argmax(dim=-1)
    hard = F.one_hot(hard_index, logits.shape[-1]).to(soft.dtype)
    return RelaxedSequence(rows=soft, straight_through=(hard - soft).detach() + soft, hard_index=hard_index, tau=tau)


def sample_categorical(probs: torch.Tensor, num_samples: int, generator: torch.Generator | None = None) -> list[TokenSequence]:
    """Draw `num_samples` hard sequences from row-stochastic ``(t, d)`` probabilities."""
    draws = torch.multinomial(probs, num_samples, replacement=True, generator=generator)
    return [TokenSequence(tuple(column)) for column in draws.T.tolist()]

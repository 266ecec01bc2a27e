import torch
from pydantic import BaseModel, Field
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence

from dilma.layers import embed_tokens, masked_mean


class DeepLevConfig(BaseModel):
    embedding_dim: int = Field(default=64, ge=1, description="Token embedding width")
    encoder_hidden: int = Field(default=64, ge=1, description="Per-direction LSTM width; l = 2 * encoder_hidden")
    head_hidden: int = Field(default=128, ge=1, description="Hidden width of the regression head")
    n_pairs: int = Field(default=50_000, ge=1, description="Generated training pairs")
    max_edits: int = Field(default=5, ge=0, description="Edits per pair are uniform on 0..max_edits")
    epochs: int = Field(default=8, ge=1)
    batch_size: int = Field(default=128, ge=1)
    learning_rate: float = Field(default=2e-3, gt=0.0)


class SequenceEncoder(nn.Module):
    """Shared encoder E: bidirectional LSTM states, mean-pooled to a vector of length l."""

    def __init__(self, vocab_size: int, config: DeepLevConfig) -> None:
        super().__init__()
        self.embedding = nn.Embedding(vocab_size, config.embedding_dim, padding_idx=0)
        self.lstm = nn.LSTM(config.embedding_dim, config.encoder_hidden, batch_first=True, bidirectional=True)
        self.output_dim = 2 * config.encoder_hidden

    def forward(self, inputs: torch.Tensor, padding_mask: torch.Tensor | None = None) -> torch.Tensor:
        embedded = embed_tokens(self.embedding, inputs)
        if padding_mask is None:
            states, _ = self.lstm(embedded)
            return masked_mean(states, None)
        # The backward direction must not start from trailing pads.
        lengths = (~padding_mask).sum(dim=1).cpu()
        packed = pack_padded_sequence(embedded, lengths, batch_first=True, enforce_sorted=False)
        states, _ = self.lstm(packed)
        states, _ = pad_packed_sequence(states, batch_first=True, total_length=inputs.shape[1])
        return masked_mean(states, padding_mask)


class DeepLevenshtein(nn.Module):
    """Regresses word-level edit distance from (z_a, z_b, |z_a - z_b|, z_a * z_b)."""

    def __init__(self, vocab_size: int, config: DeepLevConfig) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.config = config
        self.encoder = SequenceEncoder(vocab_size, config)
        width = self.encoder.output_dim
        self.head = nn.Sequential(
            nn.Linear(4 * width, config.head_hidden),
            nn.ReLU(),
            nn.Linear(config.head_hidden, 1),
        )
        self.epoch_losses: list[float] = []

    def features(
        self,
        a: torch.Tensor,
        b: torch.Tensor,
        a_mask: torch.Tensor | None = None,
        b_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        z_a = self.encoder(a, a_mask)
        z_b = self.encoder(b, b_mask)
        return torch.cat([z_a, z_b, (z_a - z_b).abs(), z_a * z_b], dim=-1)

    def forward(
        self,
        a: torch.Tensor,
        b: torch.Tensor,
        a_mask: torch.Tensor | None = None,
        b_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        """Unclamped predictions ``(B,)``; training regresses these directly."""
        return self.head(self.features(a, b, a_mask, b_mask)).squeeze(-1)

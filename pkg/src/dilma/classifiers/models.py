from enum import StrEnum

import torch
from pydantic import BaseModel, Field
from torch import nn

from dilma.layers import check_max_length, embed_tokens, masked_mean


class Architecture(StrEnum):
    TRANSFORMER = "transformer"
    LSTM = "lstm"


class ClassifierConfig(BaseModel):
    architecture: Architecture = Field(description="Encoder family")
    embedding_dim: int = Field(default=128, ge=1, description="Token embedding width")
    hidden: int = Field(default=150, ge=1, description="Recurrent hidden width (lstm)")
    num_layers: int = Field(default=2, ge=1, description="Encoder layers (transformer)")
    heads: int = Field(default=4, ge=1, description="Attention heads (transformer)")
    ff_width: int = Field(default=256, ge=1, description="Feed-forward width (transformer)")
    max_length: int = Field(default=64, ge=1, description="Maximum number of positions")
    dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    pooling: str = Field(default="mean", description="How encoder states become one vector")
    epochs: int = Field(default=5, ge=1)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)

    @classmethod
    def target_defaults(cls, **overrides: object) -> "ClassifierConfig":
        return cls.model_validate({"architecture": Architecture.TRANSFORMER, "embedding_dim": 128, **overrides})

    @classmethod
    def substitute_defaults(cls, **overrides: object) -> "ClassifierConfig":
        return cls.model_validate({"architecture": Architecture.LSTM, "hidden": 150, "dropout": 0.3, **overrides})


class TransformerClassifier(nn.Module):
    def __init__(self, vocab_size: int, num_classes: int, config: ClassifierConfig) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.num_classes = num_classes
        self.config = config
        width = config.embedding_dim
        self.token_embedding = nn.Embedding(vocab_size, width, padding_idx=0)
        self.position_embedding = nn.Embedding(config.max_length, width)
        self.layers = nn.ModuleList([
            nn.TransformerEncoderLayer(
                d_model=width,
                nhead=config.heads,
                dim_feedforward=config.ff_width,
                dropout=config.dropout,
                activation="gelu",
                batch_first=True,
            )
            for _ in range(config.num_layers)
        ])
        self.norm = nn.LayerNorm(width)
        self.head = nn.Linear(width, num_classes)
        self.epoch_losses: list[float] = []

    def forward(self, inputs: torch.Tensor, padding_mask: torch.Tensor | None = None) -> torch.Tensor:
        check_max_length(inputs, self.config.max_length)
        positions = torch.arange(inputs.shape[1], device=inputs.device)
        hidden = embed_tokens(self.token_embedding, inputs) + self.position_embedding(positions)
        for layer in self.layers:
            hidden = layer(hidden, src_key_padding_mask=padding_mask)
        return self.head(masked_mean(self.norm(hidden), padding_mask))


class LSTMClassifier(nn.Module):
    """Single-layer LSTM, mean-pooled over real positions, then a linear layer."""

    def __init__(self, vocab_size: int, num_classes: int, config: ClassifierConfig) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.num_classes = num_classes
        self.config = config
        self.embedding = nn.Embedding(vocab_size, config.embedding_dim, padding_idx=0)
        self.lstm = nn.LSTM(config.embedding_dim, config.hidden, batch_first=True)
        self.dropout = nn.Dropout(config.dropout)
        self.head = nn.Linear(config.hidden, num_classes)
        self.epoch_losses: list[float] = []

    def forward(self, inputs: torch.Tensor, padding_mask: torch.Tensor | None = None) -> torch.Tensor:
        check_max_length(inputs, self.config.max_length)
        # Pads trail the real tokens, so a left-to-right LSTM never mixes them into real states.
        states, _ = self.lstm(self.dropout(embed_tokens(self.embedding, inputs)))
        return self.head(masked_mean(self.dropout(states), padding_mask))


type Classifier = TransformerClassifier | LSTMClassifier


def build_classifier(vocab_size: int, num_classes: int, config: ClassifierConfig) -> Classifier:
    if config.architecture == Architecture.TRANSFORMER:
        return TransformerClassifier(vocab_size, num_classes, config)
    return LSTMClassifier(vocab_size, num_classes, config)

from enum import StrEnum

import torch
from pydantic import BaseModel, Field, model_validator
from torch import nn

from dilma.layers import check_max_length

EMBEDDINGS = "embeddings"
ENCODER_LAYERS = "encoder_layers"
FINAL_ENCODER_LAYER = "final_encoder_layer"
OUTPUT_PROJECTION = "output_projection"
PARAMETER_GROUP_NAMES = (EMBEDDINGS, ENCODER_LAYERS, FINAL_ENCODER_LAYER, OUTPUT_PROJECTION)


class ParameterSubset(StrEnum):
    """Which MLM parameters an attack fine-tunes."""

    ALL = "all"
    LAST_LAYERS = "last_layers"  # final encoder layer + output projection


class MLMConfig(BaseModel):
    num_layers: int = Field(default=2, ge=1, description="Transformer encoder layers")
    width: int = Field(default=128, ge=1, description="Model width")
    heads: int = Field(default=4, ge=1, description="Attention heads")
    ff_width: int = Field(default=256, ge=1, description="Feed-forward width")
    max_length: int = Field(default=64, ge=1, description="Maximum number of positions")
    dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    epochs: int = Field(default=10, ge=0, description="Pretraining epochs; 0 returns the initialization")
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    mask_fraction: float = Field(default=0.15, gt=0.0, le=1.0, description="Share of positions selected for prediction")
    mask_token_share: float = Field(default=0.8, ge=0.0, le=1.0, description="Selected positions replaced by MASK")
    random_token_share: float = Field(default=0.1, ge=0.0, le=1.0, description="Selected positions replaced randomly")

    @model_validator(mode="after")
    def _check(self) -> "MLMConfig":
        if self.width % self.heads != 0:
            raise ValueError("width must be divisible by heads")
        if self.mask_token_share + self.random_token_share > 1.0:
            raise ValueError("mask_token_share + random_token_share must not exceed 1")
        return self


class MaskedLanguageModel(nn.Module):
    """Transformer encoder with a per-position vocabulary projection.

    Parameters are partitioned into the named groups of ``PARAMETER_GROUP_NAMES``.
    """

    def __init__(self, vocab_size: int, config: MLMConfig) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.config = config
        self.token_embedding = nn.Embedding(vocab_size, config.width, padding_idx=0)
        self.position_embedding = nn.Embedding(config.max_length, config.width)
        self.embedding_norm = nn.LayerNorm(config.width)
        self.layers = nn.ModuleList([
            nn.TransformerEncoderLayer(
                d_model=config.width,
                nhead=config.heads,
                dim_feedforward=config.ff_width,
                dropout=config.dropout,
                activation="gelu",
                batch_first=True,
            )
            for _ in range(config.num_layers)
        ])
        self.output_norm = nn.LayerNorm(config.width)
        self.output_projection = nn.Linear(config.width, vocab_size)
        self.epoch_losses: list[float] = []

    def forward(self, ids: torch.Tensor, padding_mask: torch.Tensor | None = None) -> torch.Tensor:
        check_max_length(ids, self.config.max_length)
        positions = torch.arange(ids.shape[1], device=ids.device)
        hidden = self.embedding_norm(self.token_embedding(ids) + self.position_embedding(positions))
        for layer in self.layers:
            hidden = layer(hidden, src_key_padding_mask=padding_mask)
        return self.output_projection(self.output_norm(hidden))

    def group_of(self, parameter_name: str) -> str:
        if parameter_name.startswith(("token_embedding.", "position_embedding.", "embedding_norm.")):
            return EMBEDDINGS
        if parameter_name.startswith("layers."):
            index = int(parameter_name.split(".")[1])
            return FINAL_ENCODER_LAYER if index == len(self.layers) - 1 else ENCODER_LAYERS
        return OUTPUT_PROJECTION

    def parameter_groups(self) -> dict[str, list[tuple[str, nn.Parameter]]]:
        groups: dict[str, list[tuple[str, nn.Parameter]]] = {name: [] for name in PARAMETER_GROUP_NAMES}
        for name, parameter in self.named_parameters():
            groups[self.group_of(name)].append((name, parameter))
        return groups

    def trainable_parameters(self, subset: ParameterSubset) -> list[nn.Parameter]:
        if subset == ParameterSubset.ALL:
            return list(self.parameters())
        groups = self.parameter_groups()
        return [p for _, p in groups[FINAL_ENCODER_LAYER] + groups[OUTPUT_PROJECTION]]

"""Self-describing model checkpoints.

A checkpoint records what the model is, how it was built, which vocabulary it
speaks and which seed produced it, next to the tensors themselves.
"""

import hashlib
from pathlib import Path
from typing import Any

import torch
from torch import nn

from dilma.errors import DilmaErrorCodes, dilma_error


def parameter_hash(module: nn.Module) -> str:
    digest = hashlib.sha256()
    for name, tensor in sorted(module.state_dict().items()):
        digest.update(name.encode("utf-8"))
        digest.update(tensor.detach().cpu().contiguous().numpy().tobytes())
    return digest.hexdigest()


def save_checkpoint(
    path: Path,
    module: nn.Module,
    *,
    kind: str,
    config: dict[str, Any],
    vocab_hash: str,
    seed: int,
    parameter_groups: dict[str, list[str]] | None = None,
    manifest: dict[str, Any] | None = None,
) -> None:
    state_dict = module.state_dict()
    payload = {
        "kind": kind,
        "config": config,
        "vocab_hash": vocab_hash,
        "seed": seed,
        "state_dict": state_dict,
        "shapes": {name: list(tensor.shape) for name, tensor in state_dict.items()},
        "parameter_groups": parameter_groups or {},
        "manifest": manifest or {},
    }
    torch.save(payload, path)


def load_checkpoint(path: Path, *, kind: str, vocab_hash: str | None = None) -> dict[str, Any]:
    """Read a checkpoint and verify its kind and, when given, its vocabulary hash."""
    if not path.exists():
        raise dilma_error(DilmaErrorCodes.MISSING_ARTIFACT, f"checkpoint {path} does not exist")
    payload = torch.load(path, map_location="cpu", weights_only=True)
    if payload.get("kind") != kind:
        raise dilma_error(
            DilmaErrorCodes.INVALID_INPUT, f"checkpoint {path} holds a {payload.get('kind')!r}, expected {kind!r}"
        )
    if vocab_hash is not None and payload.get("vocab_hash") != vocab_hash:
        raise dilma_error(
            DilmaErrorCodes.VOCABULARY_MISMATCH,
            f"checkpoint {path} was built for vocabulary {str(payload.get('vocab_hash'))[:12]}, "
            f"current vocabulary is {vocab_hash[:12]}",
        )
    return payload

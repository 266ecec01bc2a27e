import random
from collections.abc import Iterator

import numpy as np
import torch

from dilma.errors import DilmaErrorCodes, dilma_error


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def derive_seeds(seed: int, count: int) -> list[int]:
    """Independent child seeds for separate random streams of one run."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)]


def require_one_batch(n: int, batch_size: int, what: str) -> None:
    if n < batch_size:
        raise dilma_error(
            DilmaErrorCodes.INSUFFICIENT_DATA, f"{what} has {n} items, fewer than one batch of {batch_size}"
        )


def batch_indices(n: int, batch_size: int, generator: torch.Generator | None = None) -> Iterator[list[int]]:
    """Shuffled (when a generator is given) index batches covering ``range(n)``."""
    order = torch.randperm(n, generator=generator).tolist() if generator is not None else list(range(n))
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


class EarlyStopping:
    """Tracks a validation loss and signals a stop after `patience` epochs without improvement."""

    def __init__(self, patience: int, min_delta: float = 0.0) -> None:
        self.patience = patience
        self.min_delta = min_delta
        self.best: float = float("inf")
        self.best_epoch: int = -1
        self.bad_epochs = 0

    def step(self, epoch: int, loss: float) -> bool:
        """Record an epoch's loss; returns True when training should stop."""
        if loss < self.best - self.min_delta:
            self.best = loss
            self.best_epoch = epoch
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        return self.bad_epochs >= self.patience

import math

import torch

from dilma.errors import DilmaErrorCodes, dilma_error

C_Y_MAX = 1.0 - 1e-7


def dilma_loss[T: (float, torch.Tensor)](dl_value: T, c_y: T, beta: float) -> T:
    """beta * (1 - DL)^2 - log(1 - C_y), with C_y clamped to C_Y_MAX."""
    if beta < 0:
        raise dilma_error(DilmaErrorCodes.INVALID_INPUT, f"beta must be non-negative, got {beta}")
    if isinstance(c_y, torch.Tensor):
        c = c_y.clamp(max=C_Y_MAX)
        return beta * (1.0 - dl_value) ** 2 - torch.log1p(-c)
    c = min(float(c_y), C_Y_MAX)
    return beta * (1.0 - float(dl_value)) ** 2 - math.log1p(-c)


def was_clamped(c_y: float | torch.Tensor) -> bool:
    if isinstance(c_y, torch.Tensor):
        return bool((c_y.detach() > C_Y_MAX).any())
    return c_y > C_Y_MAX

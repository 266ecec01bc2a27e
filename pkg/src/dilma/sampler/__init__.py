from .gumbel import (
    UNIFORM_CLAMP,
    RelaxedSequence,
    gumbel_st_sample,
    sample_categorical,
    sample_gumbel,
    temperature_softmax,
)

__all__ = [
    "UNIFORM_CLAMP",
    "RelaxedSequence",
    "gumbel_st_sample",
    "sample_categorical",
    "sample_gumbel",
    "temperature_softmax",
]

from enum import StrEnum

import numpy as np
from pydantic import BaseModel, Field, model_validator

from dilma.lm import ParameterSubset


class AttackVariant(StrEnum):
    SAMPLING_FOOL = "sampling_fool"
    DILMA = "dilma"  # classifier term only, beta = 0
    DILMA_DL = "dilma_dl"  # classifier term + Deep Levenshtein term


class AttackConfig(BaseModel):
    variant: AttackVariant = Field(default=AttackVariant.DILMA_DL)
    beta: float = Field(default=1.0, ge=0.0, description="Weight of the distance term")
    tau: float = Field(default=1.0, gt=0.0, description="Sampling temperature")
    k: int = Field(default=8, ge=1, description="Iterations")
    m: int = Field(default=5, ge=1, description="Samples per iteration")
    learning_rate: float = Field(default=1e-3, ge=0.0, description="Plain gradient-descent step size")
    parameter_subset: ParameterSubset = Field(default=ParameterSubset.LAST_LAYERS)
    seed: int = Field(default=0)
    zero_noise: bool = Field(default=False, description="Force Gumbel noise to zero (test hook)")

    @model_validator(mode="before")
    @classmethod
    def _dilma_has_no_distance_term(cls, data: object) -> object:
        if isinstance(data, dict) and str(data.get("variant")) == AttackVariant.DILMA.value:
            return {**data, "beta": 0.0}
        return data

    @model_validator(mode="after")
    def _check_beta(self) -> "AttackConfig":
        if self.variant == AttackVariant.DILMA_DL and self.beta == 0.0:
            raise ValueError("dilma_dl needs beta > 0; use the dilma variant for beta = 0")
        return self

    def for_example(self, index: int) -> "AttackConfig":
        """Config for the index-th attacked example: its own seed, everything else shared."""
        return self.model_copy(update={"seed": self.seed + index})


class SearchSpace(BaseModel):
    """Ranges for random hyperparameter search; beta and learning rate are sampled log-uniformly."""

    variant: AttackVariant = Field(default=AttackVariant.DILMA_DL)
    beta: tuple[float, float] = Field(default=(0.1, 10.0))
    tau: tuple[float, float] = Field(default=(0.5, 2.0))
    learning_rate: tuple[float, float] = Field(default=(1e-4, 1e-2))
    k: list[int] = Field(default_factory=lambda: [4, 8, 12])
    m: list[int] = Field(default_factory=lambda: [3, 5, 8])
    parameter_subset: ParameterSubset = Field(default=ParameterSubset.LAST_LAYERS)

    def sample(self, rng: np.random.Generator, seed: int) -> AttackConfig:
        def log_uniform(bounds: tuple[float, float]) -> float:
            return float(np.exp(rng.uniform(np.log(bounds[0]), np.log(bounds[1]))))

        beta = log_uniform(self.beta)
        tau = float(rng.uniform(*self.tau))
        learning_rate = log_uniform(self.learning_rate)
        k = int(rng.choice(self.k))
        m = int(rng.choice(self.m))
        return AttackConfig(
            variant=self.variant,
            beta=beta,
            tau=tau,
            learning_rate=learning_rate,
            k=k,
            m=m,
            parameter_subset=self.parameter_subset,
            seed=seed,
        )

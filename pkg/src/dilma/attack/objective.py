from dataclasses import dataclass

import torch

from dilma.classifiers import Classifier
from dilma.deeplev import DeepLevenshtein
from dilma.lm import MaskedLanguageModel
from dilma.sampler import RelaxedSequence, gumbel_st_sample
from dilma.textcore import TokenSequence

from .loss import dilma_loss, was_clamped


@dataclass(slots=True)
class ObjectiveValue:
    loss: torch.Tensor  # mean over the m samples
    c_y: torch.Tensor  # (m,)
    dl: torch.Tensor | None  # (m,), None when the distance term is skipped
    clamped: bool


class DilmaObjective:
    """
    The attack loss as a function of the MLM parameters.

    Logits come from the MLM on the intact sequence x; m Gumbel samples are scored
    by the substitute (true-class probability) and, when beta > 0, by Deep
    Levenshtein against x. The straight-through path feeds hard one-hot rows
    forward; the soft path feeds the relaxed rows themselves.
    """

    def __init__(
        self,
        mlm: MaskedLanguageModel,
        substitute: Classifier,
        deeplev: DeepLevenshtein | None,
        x: TokenSequence,
        y: int,
        *,
        beta: float,
        tau: float,
        m: int,
    ) -> None:
        self.mlm = mlm
        self.substitute = substitute
        self.deeplev = deeplev
        self.x_ids = x.as_tensor().unsqueeze(0)
        self.y = y
        self.beta = beta
        self.tau = tau
        self.m = m

    @property
    def uses_distance(self) -> bool:
        return self.beta > 0 and self.deeplev is not None

    def logits(self) -> torch.Tensor:
        """``(m, t, d)`` logits, one copy of the MLM output per sample."""
        return self.mlm(self.x_ids).expand(self.m, -1, -1)

    def sample(
        self,
        generator: torch.Generator | None,
        *,
        zero_noise: bool = False,
        noise: torch.Tensor | None = None,
    ) -> RelaxedSequence:
        return gumbel_st_sample(self.logits(), self.tau, generator, zero_noise=zero_noise, noise=noise)

    def evaluate(self, relaxed: RelaxedSequence, *, straight_through: bool = True) -> ObjectiveValue:
        rows = relaxed.straight_through if straight_through else relaxed.rows
        c_y = torch.softmax(self.substitute(rows), dim=-1)[:, self.y]

        dl: torch.Tensor | None = None
        if self.uses_distance:
            assert self.deeplev is not None
            reference = self.x_ids.expand(rows.shape[0], -1)
            dl = self.deeplev(rows, reference).clamp(min=0.0)
            per_sample = dilma_loss(dl, c_y, self.beta)
        else:
            per_sample = dilma_loss(torch.zeros_like(c_y), c_y, 0.0)

        return ObjectiveValue(loss=per_sample.mean(), c_y=c_y, dl=dl, clamped=was_clamped(c_y))

    def loss(self, noise: torch.Tensor, *, straight_through: bool = False) -> torch.Tensor:
        """Loss for a fixed noise tensor; the soft path makes it smooth in the MLM parameters."""
        return self.evaluate(self.sample(None, noise=noise), straight_through=straight_through).loss

"""Analytic gradients against finite differences, in float64."""

import copy

import pytest
import torch

from dilma.attack import DilmaObjective
from dilma.lm import ParameterSubset
from dilma.sampler import sample_gumbel


@pytest.fixture
def rows(tiny_vocab) -> torch.Tensor:
    generator = torch.Generator().manual_seed(0)
    logits = torch.randn(1, 6, tiny_vocab.size, generator=generator, dtype=torch.float64)
    return torch.softmax(logits, dim=-1).requires_grad_(True)


def test_substitute_gradient_in_relaxed_rows(tiny_substitute, rows):
    substitute = copy.deepcopy(tiny_substitute).double()
    assert torch.autograd.gradcheck(lambda r: torch.log_softmax(substitute(r), dim=-1), (rows,), eps=1e-6, atol=1e-6, rtol=1e-3)


def test_deeplev_gradient_in_relaxed_rows(tiny_deeplev, rows, example):
    deeplev = copy.deepcopy(tiny_deeplev).double()
    reference = example.sequence.as_tensor().unsqueeze(0)
    assert torch.autograd.gradcheck(lambda r: deeplev(r, reference), (rows,), eps=1e-6, atol=1e-6, rtol=1e-3)


@pytest.mark.parametrize("beta", [0.0, 1.5])
def test_attack_loss_gradient_in_mlm_parameters(tiny_mlm, tiny_substitute, tiny_deeplev, tiny_vocab, example, beta):
    mlm = copy.deepcopy(tiny_mlm).double()
    objective = DilmaObjective(
        mlm,
        copy.deepcopy(tiny_substitute).double(),
        copy.deepcopy(tiny_deeplev).double(),
        example.sequence,
        example.label,
        beta=beta,
        tau=1.0,
        m=3,
    )
    generator = torch.Generator().manual_seed(1)
    noise = sample_gumbel(torch.Size((3, len(example.sequence), tiny_vocab.size)), generator, torch.float64)
    parameters = mlm.trainable_parameters(ParameterSubset.LAST_LAYERS)

    gradients = torch.autograd.grad(objective.loss(noise), parameters)
    directions = [torch.randn(p.shape, generator=generator, dtype=torch.float64) for p in parameters]
    analytic = sum(float((g * v).sum()) for g, v in zip(gradients, directions, strict=True))

    # Evaluated with gradients enabled so the encoder layers take the same code path as above.
    eps = 1e-6

    def shifted(scale: float) -> float:
        with torch.no_grad():
            for p, v in zip(parameters, directions, strict=True):
                p.add_(scale * eps * v)
        value = float(objective.loss(noise))
        with torch.no_grad():
            for p, v in zip(parameters, directions, strict=True):
                p.sub_(scale * eps * v)
        return value

    numeric = (shifted(1.0) - shifted(-1.0)) / (2 * eps)
    assert abs(numeric - analytic) <= 1e-2 * abs(analytic) + 1e-6


def test_straight_through_forward_scores_the_hard_sample(tiny_mlm, tiny_substitute, example):
    objective = DilmaObjective(tiny_mlm, tiny_substitute, None, example.sequence, example.label, beta=0.0, tau=1.0, m=4)
    relaxed = objective.sample(torch.Generator().manual_seed(0))
    value = objective.evaluate(relaxed)
    with torch.no_grad():
        hard = torch.softmax(tiny_substitute(relaxed.hard_index), dim=-1)[:, example.label]
    torch.testing.assert_close(value.c_y.detach(), hard, rtol=1e-5, atol=1e-6)
    assert value.dl is None


def test_zero_noise_sample_is_the_argmax(tiny_mlm, tiny_substitute, example):
    objective = DilmaObjective(tiny_mlm, tiny_substitute, None, example.sequence, example.label, beta=0.0, tau=0.5, m=2)
    relaxed = objective.sample(None, zero_noise=True)
    expected = tiny_mlm(example.sequence.as_tensor().unsqueeze(0))[0].detach().argmax(dim=-1)
    assert torch.equal(relaxed.hard_index[0], expected)
    assert torch.equal(relaxed.hard_index[1], expected)

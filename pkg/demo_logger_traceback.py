"""Quick script to look at attack tracebacks in development mode.

Usage:
    # Focused mode (default):
    uv run python demo_logger_traceback.py

    # Rich mode (full locals):
    uv run python demo_logger_traceback.py rich
"""

import os
import sys

os.environ["IS_PROD"] = "false"
os.environ["LOGGER_USER_CODE_PATHS"] = "dilma-attack"

if len(sys.argv) > 1 and sys.argv[1].lower() == "rich":
    os.environ["DEV_TRACEBACK_STYLE"] = "rich"
    print("Using: DEV_TRACEBACK_STYLE=rich (full locals for all frames)\n")
else:
    os.environ["DEV_TRACEBACK_STYLE"] = "focused"
    print("Using: DEV_TRACEBACK_STYLE=focused (locals only for user code)\n")

import torch

from dilma.attack import AttackConfig, AttackVariant, run_attack
from dilma.classifiers import Architecture, ClassifierConfig, build_classifier
from dilma.lm import MaskedLanguageModel, MLMConfig
from dilma.logger import get_logger, init_logger
from dilma.textcore import LabeledExample, TokenSequence

init_logger()
logger = get_logger(__name__)

VOCAB_SIZE = 20


def attack_with_mismatched_substitute() -> None:
    """The substitute knows one token fewer than the MLM, which the attack rejects."""
    mlm = MaskedLanguageModel(VOCAB_SIZE, MLMConfig(num_layers=1, width=8, heads=2, ff_width=16, max_length=16))
    substitute = build_classifier(
        VOCAB_SIZE - 1, 2, ClassifierConfig(architecture=Architecture.LSTM, embedding_dim=8, hidden=8)
    )
    example = LabeledExample(sequence=TokenSequence(ids=(3, 4, 5, 6)), label=1, raw_text="demo")
    run_attack(example, mlm, substitute, None, AttackConfig(variant=AttackVariant.DILMA, k=2, m=2))


def scores_out_of_range() -> None:
    """A library frame (torch) raising on user-supplied tensors."""
    logits = torch.zeros(2, 3)
    torch.nn.functional.nll_loss(logits.log_softmax(-1), torch.tensor([0, 7]))


def main() -> None:
    logger.info("Test 1: Attack inputs rejected in user code")
    logger.info("-" * 50)

    try:
        attack_with_mismatched_substitute()
    except Exception:
        logger.exception("attack failed")

    logger.info("")
    logger.info("Test 2: Error raised inside torch")
    logger.info("-" * 50)

    try:
        scores_out_of_range()
    except Exception:
        logger.exception("loss computation failed")


if __name__ == "__main__":
    main()

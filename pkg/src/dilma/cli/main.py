import argparse
from collections.abc import Callable, Sequence
from pathlib import Path

from dilma.attack import AttackVariant
from dilma.config import RunConfig
from dilma.errors import handle_cli_error
from dilma.logger import get_logger, init_logger, run_context
from dilma.training import seed_everything

from . import commands
from .workspace import Workspace

type Command = Callable[[Workspace, argparse.Namespace], None]

COMMANDS: dict[str, tuple[Command, str]] = {
    "pretrain": (commands.pretrain, "Pretrain the masked language model on the training split"),
    "train-target": (commands.train_target_command, "Train the attacked target classifier"),
    "train-substitute": (commands.train_substitute_command, "Train the attacker's substitute on its half of the data"),
    "train-deeplev": (commands.train_deeplev_command, "Train the Deep Levenshtein distance surrogate"),
    "attack": (commands.attack, "Attack the test examples and write an attack file"),
    "evaluate": (commands.evaluate_command, "Score an attack file against the target"),
    "defend": (commands.defend, "Retrain the target with adversarial examples and report NAD before and after"),
    "detect": (commands.detect, "Train an adversarial-example discriminator and report its ROC AUC"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dilma", description="Black-box adversarial attacks on text classifiers")
    parser.add_argument("--config", type=Path, default=None, help="Flat key=value run config file")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="Override one setting"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        if name in {"attack", "evaluate", "defend", "detect"}:
            sub.add_argument("--variant", choices=[v.value for v in AttackVariant], default=None)
        if name in {"evaluate", "defend", "detect"}:
            sub.add_argument("--attack-file", default=None, help="Attack output JSON-lines, possibly from another tool")
        if name == "attack":
            sub.add_argument("--tune", action="store_true", help="Random-search the attack settings first")
        if name == "evaluate":
            sub.add_argument(
                "--tags",
                nargs=3,
                action="append",
                metavar=("NAME", "ORIGINAL_TAGS", "ADVERSARIAL_TAGS"),
                help="Line-aligned tag files for the originals and the adversarials",
            )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    init_logger()
    logger = get_logger(__name__)
    try:
        config = RunConfig.from_sources(args.config, args.overrides)
        logger.info("run config resolved", command=args.command, **config.model_dump(mode="json"))
        seed_everything(config.seed)
        command, _ = COMMANDS[args.command]
        with run_context(config.run_dir().name, args.command):
            command(Workspace(config), args)
    except Exception as e:
        logger.debug("command failed", command=args.command, exc_info=True)
        return handle_cli_error(e)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

import logging
import sys
from argparse import ArgumentParser

import uavmec
from uavmec import harness
from uavmec.exceptions import CheckpointException, ConfigException

from . import __version__

__all__ = ["main"]


def build_parser():
    parser = ArgumentParser(prog="uavmec")
    parser.add_argument("-v", "--version", action="version", version=__version__)
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging threshold",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add_common(sub):
        sub.add_argument("--config", help="key,value csv config file")
        sub.add_argument("--seed", type=int, help="override the run seed")
        sub.add_argument("--out", help="override the output directory")

    train = commands.add_parser("train", help="train an agent")
    add_common(train)
    train.add_argument("--scheme", choices=uavmec.SCHEMES)

    evaluate = commands.add_parser("eval", help="evaluate a checkpoint")
    add_common(evaluate)
    evaluate.add_argument("--checkpoint", required=True, help="checkpoint .npz file")
    evaluate.add_argument("--scheme", choices=uavmec.SCHEMES)
    evaluate.add_argument("--episodes", type=int, help="evaluation episodes")

    validate = commands.add_parser("validate", help="run the self-checks")
    validate.add_argument("--seed", type=int, default=0)

    sweep = commands.add_parser("sweep", help="compare schemes along one axis")
    add_common(sweep)
    sweep.add_argument("--axis", choices=uavmec.AXES, required=True)
    sweep.add_argument(
        "--scheme",
        choices=uavmec.SCHEMES,
        action="append",
        help="scheme to include, repeatable (default: sweep_schemes)",
    )
    return parser


def main(args=None):
    """Run a command and return its exit status."""
    args = build_parser().parse_args(args)
    logging.basicConfig(level=args.log_level, format="%(levelname)s: %(message)s")
    try:
        if args.command == "train":
            harness.cmd_train(args.config, args.seed, args.scheme, args.out)
        elif args.command == "eval":
            harness.cmd_eval(
                args.checkpoint,
                args.config,
                args.scheme,
                args.episodes,
                args.seed,
                args.out,
            )
        elif args.command == "validate":
            if not harness.cmd_validate(args.seed):
                return 1
        elif args.command == "sweep":
            harness.cmd_sweep(args.config, args.axis, args.seed, args.out, args.scheme)
    except (ConfigException, CheckpointException) as exc:
        print(f"uavmec {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


# test with: python -m uavmec
if __name__ == "__main__":
    sys.exit(main())

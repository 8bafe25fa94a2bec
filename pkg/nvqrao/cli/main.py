"""
Command-line entrypoint.

Usage:
    nvqrao gen --config experiment.json
    nvqrao run --config experiment.json --evolution exact --evolution trotter:4
    nvqrao report --inputs runs/optimized runs/fixed --output runs/report
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from ..evolution.methods import EvolutionKind
from ..qaoa import AnsatzMode
from ..statevector import InitialState
from .commands import COMMANDS
from .config import ENTROPY_UNITS, PARAMS_SOURCES, ConfigError, load_config

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

DEFAULT_SAMPLED_SHOTS = 100

# Flag destination -> ExperimentConfig field, where the names differ.
_FIELD_NAMES = {"evolution": "evolutions", "inputs": "report_inputs"}


class _ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors surface as ConfigError instead of exiting."""

    def error(self, message: str):
        raise ConfigError(message)


def _shared_flags() -> argparse.ArgumentParser:
    flags = _ArgumentParser(add_help=False)
    flags.add_argument("--config", help="Experiment config JSON file")
    flags.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: INFO)",
    )

    suite = flags.add_argument_group("instances")
    suite.add_argument("--output", help="Output store: directory, file:// or s3:// URI")
    suite.add_argument("--instances", help="Store holding the instance manifest")
    suite.add_argument("--sizes", type=int, nargs="+", help="Graph sizes N")
    suite.add_argument("--instances-per-size", type=int)
    suite.add_argument("--degree", type=int)
    suite.add_argument("--seed", type=int, help="Base seed")
    suite.add_argument("--instance-ids", nargs="+", help="Restrict to these instance ids")
    suite.add_argument("--train-ids", nargs="+", help="Training instances for fixed-params")
    suite.add_argument("--max-nodes", type=int, help="Brute-force oracle node cap")

    ansatz = flags.add_argument_group("ansatz")
    ansatz.add_argument("--mode", choices=[mode.value for mode in AnsatzMode])
    ansatz.add_argument("--m", type=int, choices=[2, 3], help="Bits per qubit")
    ansatz.add_argument("--mixer", help="Mixer axis: X, Y or Z")
    ansatz.add_argument("--init", choices=[state.value for state in InitialState])
    ansatz.add_argument(
        "--evolution",
        action="append",
        help="Cost-layer method, repeatable: "
        + ", ".join(f"{kind.value}[:T]" for kind in EvolutionKind),
    )
    ansatz.add_argument("--encoding-seed", type=int)
    ansatz.add_argument(
        "--shuffle-terms", type=int, metavar="SEED", help="Shuffle cost-term order with SEED"
    )

    params = flags.add_argument_group("parameters")
    params.add_argument("--p-min", type=int)
    params.add_argument("--p-max", type=int)
    params.add_argument("--restarts", type=int)
    params.add_argument("--budget", type=int, help="Energy evaluations per restart")
    params.add_argument("--params-source", choices=PARAMS_SOURCES)
    params.add_argument("--angle-table", help="Fixed-parameter table JSON")
    params.add_argument("--explicit-params", help="Schedule or table JSON")
    params.add_argument("--workers", type=int)

    metrics = flags.add_argument_group("metrics")
    metrics.add_argument("--permutations", type=int, help="Bipartitions per entropy value")
    metrics.add_argument("--entropy-unit", choices=ENTROPY_UNITS)
    metrics.add_argument(
        "--sampled-shots",
        type=int,
        nargs="?",
        const=DEFAULT_SAMPLED_SHOTS,
        help=f"Round from sampled shots per axis (default {DEFAULT_SAMPLED_SHOTS})",
    )
    metrics.add_argument("--dump-states", action="store_true", default=None)
    metrics.add_argument("--inputs", nargs="+", help="Run stores to aggregate in report")
    return flags


def build_parser() -> argparse.ArgumentParser:
    flags = _shared_flags()
    parser = _ArgumentParser(
        prog="nvqrao",
        description="Non-variational QRAO experiments on random regular MaxCut instances.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "gen": "Generate the random regular instance suite",
        "encode": "Write QRAC encodings and relaxed Hamiltonians",
        "oracle": "Dump brute-force MaxCut extrema",
        "run": "Evaluate instances and write metrics.csv and entropy.csv",
        "fixed-params": "Average training optima into a fixed-parameter table",
        "report": "Aggregate metric tables into per-figure CSV files",
    }
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[flags], help=helps[name])
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "config", "log_level"}
    return {
        _FIELD_NAMES.get(name, name): value
        for name, value in vars(args).items()
        if name not in skip and value is not None
    }


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 for configuration errors, 2 for any other failure
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as e:
        parser.print_usage(sys.stderr)
        print(f"nvqrao: error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        config = load_config(args.config).with_overrides(**_overrides(args))
        summary = COMMANDS[args.command](config)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG
    except Exception:
        logger.exception("nvqrao %s failed", args.command)
        return EXIT_RUNTIME

    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

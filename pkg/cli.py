"""
Command-line front end: ``python cli.py <subcommand> [flags]``.

Exit codes: 0 pass (or value computed), 1 failed check, 2 configuration
error, 3 budget refusal. Reports go to stdout, logs to stderr.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from config import settings
from models.reports import RunConfig
from services.command_runner import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, get_command_runner
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

SUBCOMMANDS = [
    "wronskian",
    "vander",
    "witt",
    "assoc-bracket",
    "only-wronskian",
    "delta-identities",
    "jacobi",
    "nkr",
    "jet-jacobi",
    "box",
    "nambu",
    "rn",
    "koszul",
    "koszul-rank",
    "finite",
    "conformal",
    "dim-jets",
    "batch",
]


# Flags whose values may start with "-" (e.g. --args "-2x,1").
VALUE_FLAGS = frozenset(
    ["--op", "--op2", "--ops", "--args", "--base", "--indices", "--exponents", "--algebra", "--check", "--y", "--phis"]
)


def fold_value_flags(argv: List[str]) -> List[str]:
    """Join each value flag with the token after it so argparse never reads the value as a flag."""
    folded: List[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token in VALUE_FLAGS:
            value = next(tokens, None)
            if value is None:
                raise ConfigError(f"argument {token}: expected one argument")
            folded.append(f"{token}={value}")
        else:
            folded.append(token)
    return folded


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cli.py", description="Homotopy N-Lie bracket constructors and verifiers")
    parser.add_argument("command", choices=SUBCOMMANDS)
    parser.add_argument("manifest", nargs="?", help="manifest file (batch only)")

    exprs = parser.add_argument_group("operators and arguments")
    exprs.add_argument("--op", help='operator expression, e.g. "W[0,1,2]" or "act(W[0,1],W[0,1])"')
    exprs.add_argument("--op2", help="second operator for rn")
    exprs.add_argument("--ops", help='differential operators, e.g. "z*d; d; z^2*d"')
    exprs.add_argument("--args", help='polynomial arguments, e.g. "1,x,x^2"')
    exprs.add_argument("--base", help="span basis for koszul / koszul-rank")
    exprs.add_argument("--indices", help="Wronskian or Witt indices, e.g. 0,1,3")
    exprs.add_argument("--exponents", help="rational exponents for vander")
    exprs.add_argument("--algebra", help="cross, a2, random, threshold or sl2")
    exprs.add_argument("--check", help="jacobi, table, rep or search (finite)")
    exprs.add_argument("--y", help="change of variable for conformal")
    exprs.add_argument("--phis", help="functions for conformal")

    sizes = parser.add_argument_group("sizes and bounds")
    sizes.add_argument("--n", type=int)
    sizes.add_argument("--k", type=int)
    sizes.add_argument("--k-in", dest="k_in", type=int)
    sizes.add_argument("--k-out", dest="k_out", type=int)
    sizes.add_argument("--N", dest="N", type=int)
    sizes.add_argument("--p", type=int)
    sizes.add_argument("--r", type=int)
    sizes.add_argument("--deg", type=int, help="test-space degree (defaults to the soundness bound)")
    sizes.add_argument("--truncation", type=int)
    sizes.add_argument("--weight-shift", dest="weight_shift", type=int, default=0)

    run = parser.add_argument_group("run control")
    run.add_argument("--seed", type=int)
    run.add_argument("--budget", type=int, help="maximum tuples (env MAX_TUPLES)")
    run.add_argument("--sample", type=int, help="evaluate K random tuples; non-certifying")
    run.add_argument("--format", choices=["json", "text"], default=settings.OUTPUT_FORMAT)
    return parser


def parse_config(argv: List[str]) -> RunConfig:
    namespace = vars(build_parser().parse_args(fold_value_flags(argv)))
    namespace.pop("manifest", None)
    return RunConfig(**namespace)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    argv = sys.argv[1:] if argv is None else argv
    runner = get_command_runner()

    try:
        namespace = build_parser().parse_args(fold_value_flags(argv))
        if namespace.command == "batch":
            if not namespace.manifest:
                raise ConfigError("batch needs a manifest file")
            summary = runner.batch(runner.load_manifest(namespace.manifest), parse_config)
            print(runner.render(summary.model_dump(mode="json"), namespace.format))
            return EXIT_PASS if summary.passed else EXIT_FAIL
        config = parse_config(argv)
    except (ConfigError, ValidationError) as e:
        logger.error(f"[CLI] {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    result = runner.run(config)
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
    else:
        print(runner.render(result.report, config.format))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

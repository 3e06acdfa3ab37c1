"""
Command-line entry point

    binetlab parse  "F[2k] = L[k]*F[k]"
    binetlab derive --wrt k --component real "F[2k] = L[k]*F[k]"
    binetlab prove  "F[n+1]*F[n-1] - F[n]^2 = (-1)^n"
    binetlab verify --grid n=0..6 "sum(j, 0, n, F[j]) = F[n+2] - 1"
    binetlab corpus --tag horadam

Exit codes: 0 success, 1 refuted or failed, 2 parse or corpus errors,
3 precondition errors, 4 no corpus entries selected.
"""
import argparse
import logging
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from dotenv import load_dotenv

# Load environment variables from .env file if it exists
load_dotenv()

from pydantic import ValidationError  # noqa: E402

from commands.base import get_command  # noqa: E402
from core.config import configure_logging, settings  # noqa: E402
from core.exceptions import BinetLabError  # noqa: E402
from core.models import Component, OutputFormat, RunConfig  # noqa: E402
from utils.reporting import render  # noqa: E402

logger = logging.getLogger(__name__)

_RANGE = re.compile(r"^\s*([a-z][a-z0-9_]*)\s*=\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")
_SEED = re.compile(r"^\s*([A-Z][A-Za-z0-9_]*)\s*=\s*(-?\d+)\s*$")


def parse_grid(values: Optional[List[str]]) -> Dict[str, Tuple[int, int]]:
    """Parse "k=-3..3,n=0..4" (repeatable) into per-index ranges"""
    grid: Dict[str, Tuple[int, int]] = {}
    for value in values or []:
        for part in value.split(","):
            match = _RANGE.match(part)
            if not match:
                raise argparse.ArgumentTypeError(f"invalid grid range '{part}'; expected name=lo..hi")
            grid[match.group(1)] = (int(match.group(2)), int(match.group(3)))
    return grid


def parse_seeds(values: Optional[List[str]]) -> Dict[str, int]:
    seeds: Dict[str, int] = {}
    for value in values or []:
        match = _SEED.match(value)
        if not match:
            raise argparse.ArgumentTypeError(f"invalid seed binding '{value}'; expected NAME=VALUE")
        seeds[match.group(1)] = int(match.group(2))
    return seeds


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=1, help="recurrence parameter p for U, V, W (default 1)")
    common.add_argument("--q", type=int, default=-1, help="recurrence parameter q for U, V, W (default -1)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TEXT.value)
    common.add_argument("--verbose", action="store_true", help="debug logging")

    identity = argparse.ArgumentParser(add_help=False)
    identity.add_argument("identity", nargs="?", help='identity such as "F[2k] = L[k]*F[k]"')
    identity.add_argument("--input", type=Path, help="read the identity (and constraint lines) from a file")

    checks = argparse.ArgumentParser(add_help=False)
    checks.add_argument("--grid", action="append", help="index ranges, e.g. k=-3..3,n=0..4")
    checks.add_argument("--seed", action="append", help="bind a symbolic seed, e.g. G0=2")

    parser = argparse.ArgumentParser(prog="binetlab", description="Derive and check identities for Lucas-type sequences")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("parse", parents=[common, identity], help="parse and print an identity")

    derive = sub.add_parser("derive", parents=[common, identity], help="differentiate an identity")
    derive.add_argument("--wrt", required=True, help="free index to differentiate with respect to")
    derive.add_argument("--component", choices=[c.value for c in Component], default=Component.REAL.value)
    derive.add_argument("--shift", help="fresh index for the shift (imaginary component)")
    derive.add_argument("--pivot", help="root exponent that becomes the shift index")
    derive.add_argument("--combine", help="fresh family for Binet recombination (imaginary component)")
    derive.add_argument("--simplify", action="store_true", help="apply the Fibonacci/Lucas rewrite rules")

    sub.add_parser("prove", parents=[common, identity], help="prove an identity symbolically")

    verify = sub.add_parser("verify", parents=[common, identity, checks], help="check an identity on a grid")
    verify.add_argument("--precision", type=int, default=settings.precision, help="digits for numeric checks")

    corpus = sub.add_parser("corpus", parents=[common], help="run the corpus")
    corpus.add_argument("--tag", action="append", default=[], help="only entries carrying this tag")
    corpus.add_argument("--corpus-dir", type=Path, help="corpus directory (default BINETLAB_CORPUS_DIR)")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        identity=getattr(args, "identity", None),
        input_path=getattr(args, "input", None),
        wrt=getattr(args, "wrt", None),
        component=getattr(args, "component", Component.REAL.value),
        shift=getattr(args, "shift", None),
        pivot=getattr(args, "pivot", None),
        combine=getattr(args, "combine", None),
        simplify=getattr(args, "simplify", False),
        grid=parse_grid(getattr(args, "grid", None)),
        p=args.p,
        q=args.q,
        precision=getattr(args, "precision", settings.precision),
        output_format=args.format,
        tags=getattr(args, "tag", []),
        seeds=parse_seeds(getattr(args, "seed", None)),
        corpus_dir=getattr(args, "corpus_dir", None),
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else settings.log_level)

    try:
        cfg = build_config(args)
    except (ValidationError, argparse.ArgumentTypeError) as e:
        parser.error(str(e))

    try:
        result = get_command(cfg.command).run(cfg)
    except BinetLabError as e:
        logger.error(f"{cfg.command} failed: {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        hint = getattr(e, "hint", None)
        if hint:
            print(f"hint: {hint}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"{cfg.command} failed: {e}")
        raise RuntimeError(f"{cfg.command} failed: {e}")

    print(render(result.payload, cfg.output_format))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""
Main CLI file - argument parsing and command registration.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from dotenv import dotenv_values

import config
from codec import DECODERS
from commands import COMMANDS, REPLAYABLE, run_params
from errors import RcppError, UsageError
from puncturing import SCHEMES
from reliability import METHODS
from utils import ensure_out_dir, write_manifest

logger = logging.getLogger("rcpp-toolkit")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class RcppArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str) -> None:
        raise UsageError(message)


def _add_code_args(p: argparse.ArgumentParser, with_k: bool = False) -> None:
    p.add_argument("--n", type=int, help="parent code length N (power of two)")
    p.add_argument("--m", type=int, help="transmitted length M")
    if with_k:
        p.add_argument("--k", type=int, help="information length K")
    p.add_argument("--scheme", choices=sorted(SCHEMES), help="puncturing scheme")
    p.add_argument("--mode", choices=["C0", "C1"], help="override the scheme's puncturing mode")


def build_parser() -> tuple[RcppArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = RcppArgumentParser(prog="rcpp", description="Rate-compatible punctured polar code toolkit")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="logging level name")
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=RcppArgumentParser)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = subparsers.add_parser(name, help=help_text)
        p.add_argument("--out", default=config.OUTPUT_DIR, help="output directory")
        p.add_argument("--params", help="key=value parameter file; explicit flags win")
        p.set_defaults(handler=COMMANDS[name])
        subs[name] = p
        return p

    p = add("spectra", "polar spectra and spectrum distances")
    _add_code_args(p)
    p.add_argument("--m-range", help="inclusive sweep a..b over M")
    p.add_argument("--direct", action="store_true", help="count full path labels instead of the code-tree view")

    p = add("construct", "build a code and write its construction file")
    _add_code_args(p, with_k=True)
    p.add_argument("--method", choices=METHODS, default="ga")
    p.add_argument("--ebn0", default="0", help="design Eb/N0 in dB; write negative values as --ebn0=-1")

    p = add("simulate", "Monte-Carlo BLER of a construction file")
    p.add_argument("--construction", help="construction.json written by `construct`")
    p.add_argument("--decoder", choices=DECODERS, default="sc")
    p.add_argument("--list-size", type=int, default=1)
    p.add_argument("--crc-poly", default=f"0x{config.CRC_POLY:x}")
    p.add_argument("--crc-degree", type=int, default=config.CRC_DEGREE)
    p.add_argument("--check-node", choices=["exact", "minsum"], default=None)
    p.add_argument("--ebn0", help="comma list or start:stop:step in dB; a leading negative value needs --ebn0=-1,0")
    p.add_argument("--trials", type=int, default=config.MAX_TRIALS, help="trial cap per point")
    p.add_argument("--max-errors", type=int, default=config.MAX_ERRORS)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--no-ledger", action="store_true", help="do not record results in the ledger")

    p = add("equiv", "count tables equivalent to QUP")
    p.add_argument("--n", type=int, help="parent code length N")
    p.add_argument("--q", type=int, help="number of punctured bits Q")
    p.add_argument("--enumerate", action="store_true", help="also list every equivalent table (N ≤ 32)")

    p = add("history", "show stored BLER points")
    p.add_argument("--scheme")
    p.add_argument("--mode")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--limit", type=int, default=50)

    p = add("replay", "re-run a manifest and verify its outputs")
    p.add_argument("--manifest", help="path to a *.manifest.json")
    p.set_defaults(out=None)

    return parser, subs


def _flag_value(value: str):
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    return value.strip()


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse flags; a --params file supplies defaults that explicit flags override."""
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.params:
        path = Path(args.params)
        if not path.is_file():
            raise UsageError(f"parameter file {path} not found")
        values = {
            key.strip().lower().replace("-", "_"): _flag_value(value)
            for key, value in dotenv_values(path).items()
            if value is not None
        }
        subs[args.command].set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = parse_args(argv)
    except UsageError as e:
        logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s %(message)s")
        logger.error("Usage error: %s", e)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    logger.info("Running %s (version %s)", args.command, config.VERSION)
    try:
        outputs = args.handler(args)
        if args.command in REPLAYABLE:
            write_manifest(ensure_out_dir(args.out), args.command, run_params(args), getattr(args, "seed", None), outputs)
    except UsageError as e:
        logger.error("Usage error: %s", e)
        return EXIT_USAGE
    except RcppError as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_RUNTIME
    except Exception:
        logger.exception("%s failed unexpectedly", args.command)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

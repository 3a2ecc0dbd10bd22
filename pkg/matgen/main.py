# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
matgen command-line entrypoint.

Subcommands read tuple documents (a file path, or - for stdin) and print JSON
documents or reports on stdout; logs go to stderr.

Exit codes:
- 0 success
- 1 mathematical failure or failing suite
- 2 input error
- 3 operation unsupported on the requested backend
"""

import argparse
import logging
import signal
import sys
from typing import Optional, Sequence

from . import __version__
from .commands import register_all_commands
from .errors import MatgenError

log = logging.getLogger("matgen")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matgen",
        description="Generation, invariants and strata of tuples of 2x2 complex matrices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO", help="DEBUG, INFO, WARNING or ERROR")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    register_all_commands(subparsers)
    return parser


def _configure_logging(level_name: str) -> None:
    level = getattr(logging, (level_name or "INFO").strip().upper(), logging.INFO)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr)
    logging.getLogger().setLevel(level)
    log.setLevel(level)


def _graceful_exit(signame):
    log.info("Received %s, shutting down.", signame)
    raise KeyboardInterrupt


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help
        return int(e.code or 0)
    _configure_logging(args.log_level)
    try:
        return args.handler(args)
    except MatgenError as e:
        log.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    except KeyboardInterrupt:
        return 130


def main():
    try:
        signal.signal(signal.SIGTERM, lambda *_: _graceful_exit("SIGTERM"))
    except Exception:
        pass
    sys.exit(run())


if __name__ == "__main__":
    main()

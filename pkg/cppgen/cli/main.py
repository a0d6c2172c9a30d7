# cppgen/cli/main.py
import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from cppgen import __version__
from cppgen.config import get_settings
from cppgen.core.exceptions import CPPGenError
from cppgen.core.logging import configure_logging, get_logger

from .commands import COMMANDS

EXIT_USAGE = 2

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cppgen",
        description="Genealogías de muestras de un proceso de nacimiento y muerte crítico",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Nivel de log (por defecto CPPGEN_LOG_LEVEL)")
    parser.add_argument("--log-json", action="store_true", help="Logs en JSON a stderr")

    # ===== COMANDOS =====
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_settings()
    configure_logging(args.log_level or settings.log_level, args.log_json or settings.log_json)

    try:
        return args.handler(args)
    except (CPPGenError, ValidationError) as exc:
        logger.debug("command_failed", command=args.command, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error de E/S: {exc}", file=sys.stderr)
        return EXIT_USAGE

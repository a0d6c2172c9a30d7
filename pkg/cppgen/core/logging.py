# cppgen/core/logging.py
import logging
import sys

import structlog
import structlog.typing

_configured = False


def configure_logging(level: str = "WARNING", json_output: bool = False) -> None:
    """Configura structlog; todo va a stderr para no ensuciar los CSV"""
    global _configured
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    renderer = (
        structlog.processors.JSONRenderer()
        if json_output
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    _configured = True


def get_logger(name: str) -> structlog.typing.FilteringBoundLogger:
    if not _configured:
        # Valores por defecto hasta que el CLI configure
        from cppgen.config import get_settings

        settings = get_settings()
        configure_logging(settings.log_level, settings.log_json)
    return structlog.get_logger(name)

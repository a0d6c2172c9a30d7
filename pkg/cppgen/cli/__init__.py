# cppgen/cli/__init__.py
from .main import build_parser, main

__all__ = ["build_parser", "main"]

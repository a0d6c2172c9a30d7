# cppgen/cli/commands/__init__.py
from . import fig, sfs, simulate, verify

COMMANDS = [simulate, sfs, fig, verify]

__all__ = ["COMMANDS", "simulate", "sfs", "fig", "verify"]

# cppgen/core/__init__.py
from .exceptions import (
    CPPGenError, DomainError, UnsupportedRegimeError, AttemptsExhaustedError,
    ConvergenceError, InsufficientSampleError, InsufficientAtomsError,
    SimulationCapError,
)
from .logging import configure_logging, get_logger
from .random import RandomStream

__all__ = [
    "CPPGenError",
    "DomainError",
    "UnsupportedRegimeError",
    "AttemptsExhaustedError",
    "ConvergenceError",
    "InsufficientSampleError",
    "InsufficientAtomsError",
    "SimulationCapError",
    "configure_logging",
    "get_logger",
    "RandomStream",
]

# cppgen/core/exceptions.py
from typing import Optional


class CPPGenError(Exception):
    """Error base de la librería"""


class DomainError(CPPGenError, ValueError):
    """Parámetro fuera de su dominio; el mensaje nombra el invariante violado"""


class UnsupportedRegimeError(CPPGenError):
    """No hay forma cerrada para el régimen pedido"""

    def __init__(self, message: str, fallback: Optional[str] = None):
        super().__init__(message)
        self.fallback = fallback


class AttemptsExhaustedError(CPPGenError):
    """El muestreo por rechazo agotó sus intentos"""

    def __init__(self, attempts: int, accepted: int):
        self.attempts = attempts
        self.accepted = accepted
        self.acceptance_rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"Se agotaron {attempts} intentos de rechazo "
            f"(tasa de aceptación empírica {self.acceptance_rate:.3g})"
        )


class ConvergenceError(CPPGenError):
    """La cuadratura no alcanzó la tolerancia pedida"""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (tolerancia alcanzada {achieved:.3g})")
        self.achieved = achieved


class InsufficientSampleError(CPPGenError):
    """Muestra demasiado chica para un test estadístico"""


class InsufficientAtomsError(CPPGenError):
    """La medida no tiene suficientes átomos"""


class SimulationCapError(CPPGenError, RuntimeError):
    """Se alcanzó el tope duro de sorteos"""

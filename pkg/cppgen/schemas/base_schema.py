# cppgen/schemas/base_schema.py
import math
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict


class DomainModel(BaseModel):
    """Schema base para los tipos del dominio (inmutables)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ===== REALES EXTENDIDOS =====

class ExtendedReal(DomainModel):
    """Real no negativo o +inf; las esperanzas infinitas son resultados, no errores"""

    value: float = 0.0
    infinite: bool = False

    @classmethod
    def of(cls, value: float) -> "ExtendedReal":
        if math.isinf(value) and value > 0:
            return cls.inf()
        if math.isnan(value) or value < 0:
            raise ValueError(f"Un real extendido debe ser >= 0 o +inf, se recibió {value}")
        return cls(value=float(value))

    @classmethod
    def inf(cls) -> "ExtendedReal":
        return cls(value=math.inf, infinite=True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def __float__(self) -> float:
        return math.inf if self.infinite else self.value

    def __mul__(self, other: Union[float, int]) -> "ExtendedReal":
        if other < 0:
            raise ValueError("Solo se permiten factores no negativos")
        if self.infinite:
            return ExtendedReal.inf() if other > 0 else ExtendedReal.of(0.0)
        return ExtendedReal.of(self.value * other)

    __rmul__ = __mul__

    def __add__(self, other: Union["ExtendedReal", float, int]) -> "ExtendedReal":
        return ExtendedReal.of(float(self) + float(other))

    __radd__ = __add__

    def __lt__(self, other) -> bool:
        return float(self) < float(other)

    def __le__(self, other) -> bool:
        return float(self) <= float(other)

    def __gt__(self, other) -> bool:
        return float(self) > float(other)

    def __ge__(self, other) -> bool:
        return float(self) >= float(other)

    def __eq__(self, other) -> bool:
        if isinstance(other, (ExtendedReal, int, float)):
            return float(self) == float(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(float(self))

    def __str__(self) -> str:
        return "inf" if self.infinite else repr(self.value)


# ===== VALIDADORES REUTILIZABLES =====

def validate_positive(value: float) -> float:
    """Validador reutilizable para reales estrictamente positivos"""
    if value is None or not value > 0 or math.isnan(value):
        raise ValueError("Debe ser estrictamente positivo")
    return value


def validate_nonnegative(value: float) -> float:
    if value is None or not value >= 0:
        raise ValueError("Debe ser no negativo")
    return value


def validate_sample_size(n: int) -> int:
    """Validador para el tamaño de muestra n >= 2"""
    if n < 2:
        raise ValueError("El tamaño de muestra n debe ser >= 2")
    return n


def as_float_array(values) -> np.ndarray:
    """Convierte a arreglo float 1-D de solo lectura"""
    array = np.array(values, dtype=float, copy=True).reshape(-1)
    array.setflags(write=False)
    return array

# cppgen/schemas/measure_schema.py
import math
from typing import List, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from .base_schema import DomainModel, as_float_array


class PointMeasure2D(DomainModel):
    """Medida puntual finita en (0,1) x (eps, inf); átomos (l, x)"""

    l: np.ndarray
    x: np.ndarray
    truncation: float = Field(gt=0)

    @field_validator("l", "x", mode="before")
    @classmethod
    def validate_coordinates(cls, v):
        return as_float_array(v)

    @model_validator(mode="after")
    def check_atoms(self):
        if self.l.size != self.x.size:
            raise ValueError("l y x deben tener la misma cantidad de átomos")
        if np.any((self.l < 0) | (self.l > 1)):
            raise ValueError("Las coordenadas l deben estar en [0,1]")
        if np.any(self.x <= self.truncation):
            raise ValueError("Todos los átomos deben estar por encima del truncamiento")
        return self

    @classmethod
    def empty(cls, truncation: float) -> "PointMeasure2D":
        return cls(l=[], x=[], truncation=truncation)

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        return list(zip(self.l.tolist(), self.x.tolist()))

    def __len__(self) -> int:
        return int(self.x.size)


class LimitOrigin(DomainModel):
    """Realización de T^(i), igual en ley a e_i = 1/(rho_0 + ... + rho_i)"""

    i: int = Field(ge=0)
    value: float

    @field_validator("value")
    @classmethod
    def validate_value(cls, v):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError("T^(i) debe ser un real positivo")
        return v

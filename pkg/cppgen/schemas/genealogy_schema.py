# cppgen/schemas/genealogy_schema.py
import math
from typing import List, Optional

import numpy as np
from pydantic import Field, field_validator, model_validator

from .base_schema import DomainModel, ExtendedReal, as_float_array
from .params_schema import Origin


# ===== GENEALOGÍA DE LA MUESTRA =====

class Genealogy(DomainModel):
    """Proceso puntual coalescente: origen (H*_0) y profundidades H*_1..H*_{n-1}"""

    origin: float = math.inf
    depths: np.ndarray

    @field_validator("depths", mode="before")
    @classmethod
    def validate_depths(cls, v):
        array = as_float_array(v)
        if array.size == 0:
            raise ValueError("Una genealogía necesita al menos una profundidad (n >= 2)")
        if np.any(~np.isfinite(array)) or np.any(array < 0):
            raise ValueError("Las profundidades deben ser reales finitos no negativos")
        return array

    @field_validator("origin")
    @classmethod
    def validate_origin(cls, v):
        if math.isnan(v) or v <= 0:
            raise ValueError("El tiempo de origen debe ser positivo o +inf")
        return v

    @model_validator(mode="after")
    def check_depths_below_origin(self):
        if math.isfinite(self.origin) and np.any(self.depths > self.origin):
            raise ValueError("Todas las profundidades deben ser menores que el origen")
        return self

    @property
    def n(self) -> int:
        return self.depths.size + 1

    @property
    def has_finite_origin(self) -> bool:
        return math.isfinite(self.origin)

    def branch_length(self, j: int) -> float:
        """Longitud H*_j de la rama j (la rama 0 es el origen)"""
        return self.origin if j == 0 else float(self.depths[j - 1])

    def extended_depths(self) -> np.ndarray:
        """(H*_0, H*_1, ..., H*_{n-1}, H*_n = +inf)"""
        return np.concatenate(([self.origin], self.depths, [math.inf]))


class OrderStatMoment(DomainModel):
    """Momento de orden m del k-ésimo estadístico de orden"""

    regime: Origin
    k: int = Field(ge=1)
    m: int = Field(ge=1)
    value: ExtendedReal


# ===== MUTACIONES Y ESPECTRO =====

class MutationEvent(DomainModel):
    """Mutación en la rama j al tiempo (hacia atrás) ell < H*_j"""

    branch: int = Field(ge=0)
    time: float = Field(gt=0)


class MutationRecord(DomainModel):
    """Mutaciones colocadas sobre una genealogía"""

    events: List[MutationEvent] = Field(default_factory=list)
    root_branch_excluded: bool = False

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


class SiteFrequencySpectrum(DomainModel):
    """Espectro xi_1..xi_{n-1}, sitios polimórficos S y diferencias fijadas"""

    xi: np.ndarray
    S: int = 0
    fixed: int = 0

    @field_validator("xi", mode="before")
    @classmethod
    def validate_xi(cls, v):
        array = np.array(v, dtype=np.int64, copy=True).reshape(-1)
        if np.any(array < 0):
            raise ValueError("Los conteos del espectro deben ser no negativos")
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_total(self):
        if int(self.xi.sum()) != self.S:
            raise ValueError("S debe ser igual a la suma de xi_k")
        return self

    @classmethod
    def from_counts(cls, xi, fixed: int = 0) -> "SiteFrequencySpectrum":
        xi = np.asarray(xi, dtype=np.int64)
        return cls(xi=xi, S=int(xi.sum()), fixed=fixed)

    @property
    def n(self) -> int:
        return self.xi.size + 1


# ===== ORÁCULO HACIA ADELANTE =====

class PopulationCPP(DomainModel):
    """Proceso puntual coalescente de la población entera, cortado en t"""

    depths: np.ndarray
    pop_size: int = Field(ge=1)

    @field_validator("depths", mode="before")
    @classmethod
    def validate_depths(cls, v):
        return as_float_array(v)

    @model_validator(mode="after")
    def check_size(self):
        if self.depths.size != self.pop_size - 1:
            raise ValueError("pop_size debe ser el número de sorteos (profundidades + 1)")
        return self


class SampleIndices(DomainModel):
    """Índices I_1 < I_2 < ... de los individuos muestreados"""

    indices: np.ndarray

    @field_validator("indices", mode="before")
    @classmethod
    def validate_indices(cls, v):
        array = np.array(v, dtype=np.int64, copy=True).reshape(-1)
        if array.size and (array[0] < 1 or np.any(np.diff(array) < 1)):
            raise ValueError("Los saltos entre índices muestreados deben ser >= 1")
        array.setflags(write=False)
        return array


class OracleTelemetry(DomainModel):
    """Telemetría del muestreo por rechazo"""

    attempts: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0

    def standard_error(self, rate: Optional[float] = None) -> float:
        """Error estándar de la tasa; con ``rate`` se usa esa tasa (hipótesis nula)"""
        if not self.attempts:
            return math.inf
        if rate is None:
            rate = self.acceptance_rate
        return math.sqrt(max(rate * (1 - rate), 0.0) / self.attempts)


class OracleBatch(DomainModel):
    """Lote de genealogías aceptadas por el oráculo y su telemetría"""

    depths: np.ndarray
    origin: float
    telemetry: OracleTelemetry
    origin_label: Optional[str] = None

# cppgen/schemas/params_schema.py
import math
from typing import Annotated, Literal, Optional, Union

from pydantic import Field, field_validator

from .base_schema import DomainModel, validate_nonnegative, validate_positive, validate_sample_size


# ===== PARÁMETROS DEL MODELO =====

class ModelParams(DomainModel):
    """Parámetros: muestra n, tasa de muestreo p, mutación theta, escala N, constante alpha"""

    n: int
    p: float
    theta: float = 0.0
    N: Optional[float] = None
    alpha: Optional[float] = None

    @field_validator("n")
    @classmethod
    def validate_n(cls, v):
        return validate_sample_size(v)

    @field_validator("p")
    @classmethod
    def validate_p(cls, v):
        return validate_positive(v)

    @field_validator("theta")
    @classmethod
    def validate_theta(cls, v):
        return validate_nonnegative(v)

    @field_validator("N", "alpha")
    @classmethod
    def validate_optional_positive(cls, v):
        if v is not None:
            validate_positive(v)
        return v

    @classmethod
    def from_alpha(cls, n: int, alpha: float, theta: float = 0.0) -> "ModelParams":
        """Régimen límite: p = n / alpha"""
        validate_positive(alpha)
        return cls(n=n, p=n / alpha, theta=theta, alpha=alpha)

    def require_oracle(self) -> float:
        """Devuelve N verificando 0 < p < N (probabilidad de muestreo p/N en (0,1))"""
        if self.N is None:
            raise ValueError("El oráculo hacia adelante requiere N")
        if not self.p < self.N:
            raise ValueError("El oráculo hacia adelante requiere p < N")
        return self.N


# ===== CONDICIÓN DE ORIGEN =====

class FixedTime(DomainModel):
    """Tiempo de origen fijo t > 0 (ley P_n^t)"""

    kind: Literal["fixed"] = "fixed"
    t: float

    @field_validator("t")
    @classmethod
    def validate_t(cls, v):
        return validate_positive(v)

    def label(self) -> str:
        return f"fixed:{self.t!r}"


class InfiniteTime(DomainModel):
    """Tiempo de origen infinito (ley P_n^(inf))"""

    kind: Literal["infinite"] = "infinite"

    def label(self) -> str:
        return "infinite"


class PowerPrior(DomainModel):
    """Prior impropio g_i(x) = x^-i sobre el tiempo de origen (ley P_n^(i))"""

    kind: Literal["prior"] = "prior"
    i: int = Field(ge=0)

    def label(self) -> str:
        return f"prior:{self.i}"

    def check_sample_size(self, n: int) -> None:
        if not self.i < n:
            raise ValueError(f"El prior g_{self.i} requiere i < n (n={n})")


Origin = Union[FixedTime, InfiniteTime, PowerPrior]
OriginCondition = Annotated[Origin, Field(discriminator="kind")]


def parse_origin(text: str) -> Origin:
    """Interpreta 'fixed:T', 'infinite' o 'prior:I'"""
    text = text.strip().lower()
    if text in ("infinite", "inf"):
        return InfiniteTime()
    kind, _, value = text.partition(":")
    if kind == "fixed" and value:
        t = float(value)
        if math.isinf(t):
            return InfiniteTime()
        return FixedTime(t=t)
    if kind == "prior" and value:
        return PowerPrior(i=int(value))
    raise ValueError(f"Origen no reconocido: '{text}' (use fixed:T, infinite o prior:I)")

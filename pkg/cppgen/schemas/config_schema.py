# cppgen/schemas/config_schema.py
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from .base_schema import validate_positive, validate_sample_size
from .params_schema import FixedTime, ModelParams, Origin, PowerPrior, parse_origin


class RunConfig(BaseModel):
    """Parámetros comunes de los comandos"""

    seed: int = Field(0, ge=0, lt=2**64)
    threads: Optional[int] = Field(None, ge=1)
    output: Optional[Path] = None


class ModelRunConfig(RunConfig):
    """Comandos que construyen ModelParams: p directo o alpha (p = n/alpha)"""

    n: int
    p: Optional[float] = None
    alpha: Optional[float] = None
    theta: float = Field(0.0, ge=0)
    origin: str = "infinite"
    replicates: int = Field(1, ge=1)

    @field_validator("n")
    @classmethod
    def validate_n(cls, v):
        return validate_sample_size(v)

    @field_validator("p", "alpha")
    @classmethod
    def validate_rates(cls, v):
        if v is not None:
            validate_positive(v)
        return v

    @field_validator("origin")
    @classmethod
    def validate_origin(cls, v):
        parse_origin(v)
        return v

    @model_validator(mode="after")
    def check_rate(self):
        if (self.p is None) == (self.alpha is None):
            raise ValueError("Indique exactamente uno de p o alpha")
        condition = self.origin_condition()
        if isinstance(condition, PowerPrior):
            condition.check_sample_size(self.n)
        return self

    def origin_condition(self) -> Origin:
        return parse_origin(self.origin)

    def model_params(self, N: Optional[float] = None) -> ModelParams:
        p = self.p if self.p is not None else self.n / self.alpha
        return ModelParams(n=self.n, p=p, theta=self.theta, N=N, alpha=self.alpha)


class SimulateConfig(ModelRunConfig):
    """simulate: genealogías (y opcionalmente mutaciones) por réplica"""

    engine: Literal["exact", "forward"] = "exact"
    N: Optional[float] = None
    mutations: Optional[Path] = None
    max_attempts: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_engine(self):
        if self.engine == "forward":
            if not isinstance(self.origin_condition(), FixedTime):
                raise ValueError("El motor forward requiere un origen fijo (fixed:T)")
            self.model_params(self.N).require_oracle()
        return self


class SfsConfig(ModelRunConfig):
    """sfs: espectro esperado o Monte Carlo"""

    mode: Literal["expected", "mc"] = "expected"
    theta: float = Field(1.0, ge=0)


class FigConfig(RunConfig):
    """fig: datos de las figuras del espectro normalizado"""

    figure: Literal["spt", "spp"]
    n: int = 10

    @field_validator("n")
    @classmethod
    def validate_n(cls, v):
        return validate_sample_size(v)


class VerifyConfig(RunConfig):
    """verify: suite de aceptación"""

    quick: bool = False
    scale: float = Field(1.0, gt=0)


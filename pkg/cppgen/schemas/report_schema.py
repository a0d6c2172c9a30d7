# cppgen/schemas/report_schema.py
import math
from typing import List, Optional

from pydantic import BaseModel, Field


class StatTestResult(BaseModel):
    """Resultado de un test estadístico"""

    name: str = ""
    statistic: float
    p_value: float
    level: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.level is None or self.p_value > self.level


class CriterionResult(BaseModel):
    """Fila del reporte de verificación"""

    criterion: str
    statistic: float
    p_value: Optional[float] = None
    tolerance: float
    passed: bool = Field(serialization_alias="pass")
    detail: str = ""
    seconds: float = 0.0

    def to_report(self) -> dict:
        data = self.model_dump(by_alias=True)
        for key in ("statistic", "p_value"):
            value = data.get(key)
            if isinstance(value, float) and not math.isfinite(value):
                data[key] = str(value)
        return data


class LimitCheckReport(BaseModel):
    """Resultados de la comparación de pi_n con los objetos límite"""

    regime: str
    n: int
    alpha: float
    replicates: int
    tests: List[StatTestResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(test.passed for test in self.tests)


class VerificationReport(BaseModel):
    """Reporte JSON de la suite de aceptación"""

    seed: int
    quick: bool
    results: List[CriterionResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def to_report(self) -> dict:
        return {
            "seed": self.seed,
            "quick": self.quick,
            "passed": self.passed,
            "results": [result.to_report() for result in self.results],
        }

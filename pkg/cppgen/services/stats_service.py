# cppgen/services/stats_service.py
import math
from typing import Callable, Optional

import numpy as np
from scipy import stats

from cppgen.core.exceptions import DomainError, InsufficientSampleError
from cppgen.schemas.report_schema import StatTestResult

from .base_service import BaseService

MIN_SAMPLE_SIZE = 50
# Frecuencia esperada mínima por celda al agrupar colas de Poisson
MIN_EXPECTED_PER_BIN = 5.0


class StatisticalTests(BaseService):
    """Tests de bondad de ajuste con p-valores asintóticos"""

    def __init__(self):
        super().__init__(__name__)

    @staticmethod
    def _require(samples: np.ndarray, label: str = "muestra") -> np.ndarray:
        array = np.asarray(samples, dtype=float).reshape(-1)
        if array.size < MIN_SAMPLE_SIZE:
            raise InsufficientSampleError(
                f"La {label} tiene {array.size} elementos; se requieren al menos {MIN_SAMPLE_SIZE}"
            )
        return array

    def ks_test(
        self, samples, cdf: Callable, name: str = "ks", level: Optional[float] = None
    ) -> StatTestResult:
        """KS de una muestra contra una CDF invocable (vectorizada o escalar)"""
        array = self._require(samples)

        def vector_cdf(x):
            try:
                return np.asarray(cdf(x), dtype=float)
            except (TypeError, ValueError):
                return np.array([cdf(float(v)) for v in np.ravel(x)], dtype=float).reshape(np.shape(x))

        result = stats.kstest(array, vector_cdf, method="asymp")
        return StatTestResult(name=name, statistic=float(result.statistic), p_value=float(result.pvalue), level=level)

    def two_sample_ks(self, first, second, name: str = "ks_2samp", level: Optional[float] = None) -> StatTestResult:
        a = self._require(first, "primera muestra")
        b = self._require(second, "segunda muestra")
        result = stats.ks_2samp(a, b, method="asymp")
        return StatTestResult(name=name, statistic=float(result.statistic), p_value=float(result.pvalue), level=level)

    def chi_square_poisson_test(
        self, counts, mean: float, name: str = "chi2_poisson", level: Optional[float] = None
    ) -> StatTestResult:
        """
        Chi-cuadrado de conteos contra Poisson(mean). Los valores se agrupan en
        celdas consecutivas con frecuencia esperada >= 5; la última absorbe la cola.
        """
        values = np.asarray(counts).reshape(-1).astype(np.int64)
        self._require(values)
        if mean <= 0:
            raise DomainError("La media de Poisson debe ser positiva")
        if np.any(values < 0):
            raise DomainError("Los conteos deben ser no negativos")
        total = values.size
        upper = int(max(values.max(), stats.poisson.ppf(1.0 - 1e-12, mean)))
        expected = stats.poisson.pmf(np.arange(upper + 1), mean) * total
        expected[-1] += stats.poisson.sf(upper, mean) * total
        observed = np.bincount(values, minlength=upper + 1).astype(float)

        groups = np.zeros(upper + 1, dtype=np.int64)
        current, acc = 0, 0.0
        for value in range(upper + 1):
            groups[value] = current
            acc += expected[value]
            if acc >= MIN_EXPECTED_PER_BIN:
                current, acc = current + 1, 0.0
        if acc > 0.0:
            # Celda final incompleta: se une a la anterior
            groups[groups == current] = max(current - 1, 0)
        cells = int(groups.max()) + 1
        if cells < 2:
            raise InsufficientSampleError("Muy pocos conteos para formar dos celdas con frecuencia >= 5")
        observed_cells = np.bincount(groups, weights=observed, minlength=cells)
        expected_cells = np.bincount(groups, weights=expected, minlength=cells)
        expected_cells *= observed_cells.sum() / expected_cells.sum()
        result = stats.chisquare(observed_cells, expected_cells)
        return StatTestResult(name=name, statistic=float(result.statistic), p_value=float(result.pvalue), level=level)

    def chi_square_independence_test(
        self, table, name: str = "chi2_independence", level: Optional[float] = None
    ) -> StatTestResult:
        """Chi-cuadrado de independencia sobre una tabla de contingencia"""
        table = np.asarray(table, dtype=float)
        if table.ndim != 2 or min(table.shape) < 2:
            raise DomainError("La tabla de contingencia debe ser al menos 2x2")
        if table.sum() < MIN_SAMPLE_SIZE:
            raise InsufficientSampleError("La tabla de contingencia tiene menos de 50 observaciones")
        statistic, p_value, _, _ = stats.chi2_contingency(table, correction=False)
        return StatTestResult(name=name, statistic=float(statistic), p_value=float(p_value), level=level)

    @staticmethod
    def quantile_table(first, second, bins: int = 4) -> np.ndarray:
        """Tabla de contingencia de dos variables cortadas en sus cuantiles empíricos"""
        first = np.asarray(first, dtype=float)
        second = np.asarray(second, dtype=float)
        probs = np.linspace(0.0, 1.0, bins + 1)[1:-1]
        a = np.searchsorted(np.quantile(first, probs), first)
        b = np.searchsorted(np.quantile(second, probs), second)
        table = np.zeros((bins, bins))
        np.add.at(table, (a, b), 1.0)
        return table

    @staticmethod
    def bonferroni(level: float, family_size: int) -> float:
        """Nivel por test para controlar el error de familia"""
        if not 0 < level < 1 or family_size < 1:
            raise DomainError("Se requiere 0 < level < 1 y family_size >= 1")
        return level / family_size

    @staticmethod
    def z_score(samples, target: float) -> float:
        """(media - objetivo) / error estándar de la media"""
        array = np.asarray(samples, dtype=float).reshape(-1)
        if array.size < 2:
            raise InsufficientSampleError("Se requieren al menos dos muestras")
        se = array.std(ddof=1) / math.sqrt(array.size)
        diff = array.mean() - target
        if se == 0:
            return 0.0 if diff == 0 else math.inf
        return float(diff / se)


statistical_tests = StatisticalTests()

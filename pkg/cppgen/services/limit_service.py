# cppgen/services/limit_service.py
import math
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaincc, gammaln

from cppgen.config import get_settings
from cppgen.core.exceptions import DomainError, InsufficientAtomsError
from cppgen.core.random import RandomStream
from cppgen.schemas.measure_schema import LimitOrigin, PointMeasure2D
from cppgen.schemas.params_schema import InfiniteTime, ModelParams, PowerPrior
from cppgen.schemas.report_schema import LimitCheckReport

from .base_service import BaseService
from .cpp_service import cpp_sampler
from .stats_service import statistical_tests

BOUND_ALPHA_T = "alpha_t"
BOUND_T = "t"
# Genealogías por bloque en empirical_limit_check
_LIMIT_CHUNK_UNIFORMS = 2_000_000


class LimitObjects(BaseService):
    """
    Objetos límite cuando n -> inf con p = n/alpha.

    **Objetos**
    * pi: medida de Poisson en (0,1) x (0,inf) de intensidad alpha dl x^-2 dx.
    * e_i = 1/(rho_0 + ... + rho_i), rho_j exponenciales de tasa alpha.
    * (T^(i), pi^(i)): par de Cox; dado T^(i) = t, pi^(i) es pi restringida bajo la cota.
    """

    def __init__(self):
        super().__init__(__name__)

    # ===== GAMMA INVERSA =====

    @staticmethod
    def _check_gamma(i: int, alpha: float) -> None:
        if i < 0:
            raise DomainError("Se requiere i >= 0")
        if alpha <= 0:
            raise DomainError("Se requiere alpha > 0")

    def inv_gamma_cdf(self, i: int, alpha: float, t):
        """P(e_i <= t) = Q(i+1, alpha/t)"""
        self._check_gamma(i, alpha)
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            value = np.where(t > 0, gammaincc(i + 1, alpha / np.where(t > 0, t, 1.0)), 0.0)
        return float(value) if value.ndim == 0 else value

    def inv_gamma_density(self, i: int, alpha: float, t):
        """alpha^{i+1} e^{-alpha/t} / (i! t^{i+2})"""
        self._check_gamma(i, alpha)
        t = np.asarray(t, dtype=float)
        safe = np.where(t > 0, t, 1.0)
        log_h = (i + 1) * math.log(alpha) - alpha / safe - gammaln(i + 1) - (i + 2) * np.log(safe)
        value = np.where(t > 0, np.exp(log_h), 0.0)
        return float(value) if value.ndim == 0 else value

    def inv_gamma_sample(self, i: int, alpha: float, rng: RandomStream, size: Optional[int] = None):
        """e_i = 1/(rho_0 + ... + rho_i)"""
        self._check_gamma(i, alpha)
        if size is None:
            return 1.0 / float(rng.exponentials(alpha, i + 1).sum())
        rho = rng.exponentials(alpha, (size, i + 1))
        return 1.0 / rho.sum(axis=1)

    # ===== ÁTOMOS Y MEDIDAS =====

    def sample_top_atoms(self, alpha: float, count: int, rng: RandomStream) -> np.ndarray:
        """T_1 > ... > T_count, T_k = 1/(rho_0 + ... + rho_{k-1})"""
        if count < 1:
            raise DomainError("Se requiere count >= 1")
        self._check_gamma(0, alpha)
        return 1.0 / np.cumsum(rng.exponentials(alpha, count))

    @staticmethod
    def default_truncation(alpha: float) -> float:
        return get_settings().truncation_factor * alpha

    def sample_ppm(self, alpha: float, x_min: float, x_max: float, rng: RandomStream) -> PointMeasure2D:
        """
        Poisson de intensidad alpha dl x^-2 dx en (0,1) x (x_min, x_max), por inversión:
        1/x = 1/x_min - (1-U)(1/x_min - 1/x_max).
        """
        if alpha <= 0:
            raise DomainError("Se requiere alpha > 0")
        if not 0 < x_min < x_max:
            raise DomainError("Se requiere 0 < x_min < x_max")
        inv_min = 1.0 / x_min
        inv_max = 0.0 if math.isinf(x_max) else 1.0 / x_max
        count = int(rng.poisson(alpha * (inv_min - inv_max)))
        u = rng.uniforms((count, 2))
        x = 1.0 / (inv_min - (1.0 - u[:, 1]) * (inv_min - inv_max))
        # Redondeo en el borde inferior
        x = np.maximum(x, np.nextafter(x_min, math.inf))
        return PointMeasure2D(l=u[:, 0], x=x, truncation=x_min)

    def sample_cox(
        self, i: int, alpha: float, x_min: float, rng: RandomStream, bound: str = BOUND_ALPHA_T
    ) -> Tuple[LimitOrigin, PointMeasure2D]:
        """T^(i) ~ e_i y, dado T^(i) = t, pi restringida a x < alpha t (o x < t con bound='t')"""
        self._check_gamma(i, alpha)
        if x_min <= 0:
            raise DomainError("Se requiere x_min > 0")
        if bound not in (BOUND_ALPHA_T, BOUND_T):
            raise DomainError(f"Cota desconocida '{bound}' (use '{BOUND_ALPHA_T}' o '{BOUND_T}')")
        origin = self.inv_gamma_sample(i, alpha, rng)
        upper = alpha * origin if bound == BOUND_ALPHA_T else origin
        if upper <= x_min:
            return LimitOrigin(i=i, value=origin), PointMeasure2D.empty(x_min)
        return LimitOrigin(i=i, value=origin), self.sample_ppm(alpha, x_min, upper, rng)

    def sample_pi_with_top_atoms(
        self, alpha: float, x_min: float, top_count: int, rng: RandomStream
    ) -> PointMeasure2D:
        """Los top_count átomos exactos y, bajo el último, la medida truncada en x_min"""
        top = self.sample_top_atoms(alpha, top_count, rng)
        top_l = rng.uniforms(top_count)
        keep = top > x_min
        if top[-1] <= x_min:
            return PointMeasure2D(l=top_l[keep], x=top[keep], truncation=x_min)
        body = self.sample_ppm(alpha, x_min, float(top[-1]), rng)
        return PointMeasure2D(
            l=np.concatenate((top_l, body.l)), x=np.concatenate((top, body.x)), truncation=x_min
        )

    def remove_largest_atoms(self, measure: PointMeasure2D, count: int) -> PointMeasure2D:
        """Quita los count átomos de mayor x (empates: mayor l primero)"""
        if count < 0:
            raise DomainError("Se requiere count >= 0")
        if len(measure) < count:
            raise InsufficientAtomsError(f"La medida tiene {len(measure)} átomos; se pidieron quitar {count}")
        if count == 0:
            return measure
        order = np.lexsort((-measure.l, -measure.x))
        keep = np.sort(order[count:])
        return PointMeasure2D(l=measure.l[keep], x=measure.x[keep], truncation=measure.truncation)

    @staticmethod
    def largest_atom(measure: PointMeasure2D) -> float:
        return float(measure.x.max()) if len(measure) else 0.0

    @staticmethod
    def box_count(
        measure: PointMeasure2D, l_range: Tuple[float, float] = (0.0, 1.0), x_range: Tuple[float, float] = (1.0, math.inf)
    ) -> int:
        """Átomos en (l_lo, l_hi) x (x_lo, x_hi)"""
        inside = (
            (measure.l > l_range[0]) & (measure.l < l_range[1])
            & (measure.x > x_range[0]) & (measure.x < x_range[1])
        )
        return int(inside.sum())

    @staticmethod
    def box_intensity(alpha: float, l_range: Tuple[float, float], x_range: Tuple[float, float]) -> float:
        """alpha |l| (1/x_lo - 1/x_hi)"""
        inv_hi = 0.0 if math.isinf(x_range[1]) else 1.0 / x_range[1]
        return alpha * (l_range[1] - l_range[0]) * (1.0 / x_range[0] - inv_hi)

    @staticmethod
    def finite_n_box_mean(n: int, alpha: float, a: float) -> float:
        """E(conteo de pi_n en (0,1) x (a,inf)) bajo origen infinito: (n-1)/n alpha/(a + alpha/n)"""
        return (n - 1) / n * alpha / (a + alpha / n)

    @staticmethod
    def measure_from_depths(depths, alpha: float, truncation: Optional[float] = None) -> PointMeasure2D:
        """pi_n: átomos (i/n, H*_i)"""
        depths = np.asarray(depths, dtype=float)
        n = depths.size + 1
        if truncation is None:
            truncation = get_settings().truncation_factor * alpha
        l = np.arange(1, n) / n
        keep = depths > truncation
        return PointMeasure2D(l=l[keep], x=depths[keep], truncation=truncation)

    # ===== CHEQUEO EMPÍRICO =====

    def empirical_limit_check(
        self,
        i: Optional[int],
        n: int,
        alpha: float,
        rng: RandomStream,
        replicates: int,
        top_k: int = 2,
        box: Tuple[float, float] = (1.0, 2.0),
        level: Optional[float] = None,
    ) -> LimitCheckReport:
        """
        Compara pi_n (p = n/alpha) con los objetos límite. i = None es origen infinito.

        * Conteos en (0,1) x box contra Poisson (solo origen infinito).
        * T_{n,j} contra e_{j-1} (infinito) o e_{i+j} (prior g_i).
        * T_or contra e_i (prior g_i).
        """
        if level is None:
            level = get_settings().significance
        params = ModelParams.from_alpha(n, alpha)
        origin = InfiniteTime() if i is None else PowerPrior(i=i)
        if i is not None:
            origin.check_sample_size(n)
        top_k = min(top_k, n - 1)

        origins, tops, counts = [], [], []
        chunk = max(1, _LIMIT_CHUNK_UNIFORMS // n)
        for start in range(0, replicates, chunk):
            size = min(chunk, replicates - start)
            batch_origins, depths = cpp_sampler.sample_genealogies(params, origin, rng, size)
            origins.append(batch_origins)
            tops.append(cpp_sampler.order_stats(depths, top_k))
            counts.append(((depths > box[0]) & (depths < box[1])).sum(axis=1))
        origins = np.concatenate(origins)
        tops = np.concatenate(tops)
        counts = np.concatenate(counts)

        family = top_k + 1
        per_test = statistical_tests.bonferroni(level, family)
        tests = []
        if i is None:
            mean = self.box_intensity(alpha, (0.0, 1.0), box)
            tests.append(statistical_tests.chi_square_poisson_test(
                counts, mean, name=f"box_count_{box[0]!r}_{box[1]!r}", level=per_test
            ))
        else:
            tests.append(statistical_tests.ks_test(
                origins, lambda x: self.inv_gamma_cdf(i, alpha, x), name="origin_vs_e_i", level=per_test
            ))
        offset = 0 if i is None else i + 1
        for j in range(top_k):
            index = offset + j
            tests.append(statistical_tests.ks_test(
                tops[:, j], lambda x, index=index: self.inv_gamma_cdf(index, alpha, x),
                name=f"T_{j + 1}_vs_e_{index}", level=per_test,
            ))

        report = LimitCheckReport(
            regime=origin.label(), n=n, alpha=alpha, replicates=replicates, tests=tests
        )
        self.logger.info("limit_check", regime=report.regime, n=n, passed=report.passed)
        return report


limit_objects = LimitObjects()

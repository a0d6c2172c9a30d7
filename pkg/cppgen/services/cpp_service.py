# cppgen/services/cpp_service.py
import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import betainc, betaincinv, xlogy

from cppgen.core.exceptions import DomainError
from cppgen.core.numeric import binomial, log_binomial, quadrature
from cppgen.core.random import RandomStream
from cppgen.schemas.base_schema import ExtendedReal
from cppgen.schemas.genealogy_schema import Genealogy, OrderStatMoment
from cppgen.schemas.params_schema import FixedTime, InfiniteTime, ModelParams, Origin, PowerPrior

from .base_service import BaseService

ArrayLike = Union[float, np.ndarray]

# Filas por bloque al muestrear lotes grandes (bloque ~ 2·10^6 uniformes)
_BATCH_UNIFORMS = 2_000_000


def _check_unit_interval(u: ArrayLike, closed_right: bool = True) -> np.ndarray:
    array = np.asarray(u, dtype=float)
    upper_ok = array <= 1.0 if closed_right else array < 1.0
    if np.any(np.isnan(array)) or np.any(array < 0.0) or not np.all(upper_ok):
        bound = "[0,1]" if closed_right else "[0,1)"
        raise DomainError(f"u debe estar en {bound}")
    return array


def _scalar_or_array(value: np.ndarray, like: ArrayLike):
    return float(value) if np.ndim(like) == 0 else value


class CPPSampler(BaseService):
    """
    Muestreo exacto y densidades del proceso puntual coalescente de la muestra.

    Todo el muestreo es por inversión: cada genealogía consume exactamente
    n-1 uniformes (origen fijo o infinito) o n (prior g_i; la primera da el origen).
    """

    def __init__(self):
        super().__init__(__name__)

    # ===== PROFUNDIDADES =====

    def cdf_depth_fixed_t(self, x: ArrayLike, p: float, t: float):
        """F(x) = (px/(1+px)) (1+pt)/(pt) en [0,t]"""
        x = np.asarray(x, dtype=float)
        tau = p * t
        inside = np.clip(x, 0.0, t)
        value = (p * inside / (1.0 + p * inside)) * (1.0 + tau) / tau
        return _scalar_or_array(np.minimum(value, 1.0), x)

    def density_depth_fixed_t(self, x: ArrayLike, p: float, t: float):
        x = np.asarray(x, dtype=float)
        tau = p * t
        value = np.where((x >= 0) & (x <= t), p / (1.0 + p * x) ** 2 * (1.0 + tau) / tau, 0.0)
        return _scalar_or_array(value, x)

    def cdf_depth_infinite(self, x: ArrayLike, p: float):
        x = np.asarray(x, dtype=float)
        inside = np.maximum(x, 0.0)
        return _scalar_or_array(p * inside / (1.0 + p * inside), x)

    def density_depth_infinite(self, x: ArrayLike, p: float):
        x = np.asarray(x, dtype=float)
        value = np.where(x >= 0, p / (1.0 + p * x) ** 2, 0.0)
        return _scalar_or_array(value, x)

    def quantile_depth_fixed_t(self, u: ArrayLike, p: float, t: float):
        """Inversa de la CDF a origen fijo; resultado en [0,t]"""
        if p <= 0 or t <= 0:
            raise DomainError("Se requiere p > 0 y t > 0")
        array = _check_unit_interval(u)
        tau = p * t
        # u t / (1 + tau (1-u)) devuelve exactamente t en u = 1
        depth = np.minimum(array * t / (1.0 + tau * (1.0 - array)), t)
        return _scalar_or_array(depth, u)

    def quantile_depth_infinite(self, u: ArrayLike, p: float):
        """Inversa de F(x) = px/(1+px); u = 1 no tiene cuantil finito"""
        if p <= 0:
            raise DomainError("Se requiere p > 0")
        array = _check_unit_interval(u, closed_right=False)
        return _scalar_or_array(array / (p * (1.0 - array)), u)

    # ===== POSTERIOR DEL ORIGEN =====

    @staticmethod
    def _check_prior(n: int, i: int) -> None:
        if n < 1:
            raise DomainError("El tamaño de muestra debe ser n >= 1")
        if not 0 <= i < n:
            raise DomainError(f"El prior g_i requiere 0 <= i < n (n={n}, i={i})")

    def origin_from_uniform(self, n: int, p: float, i: int, u: ArrayLike):
        """Y = betaincinv(n-i, i+1, U) ~ Beta(n-i, i+1), T = Y/(p(1-Y))"""
        y = betaincinv(n - i, i + 1, np.asarray(u, dtype=float))
        with np.errstate(divide="ignore"):
            origin = y / (p * (1.0 - y))
        # U = 0 (o Y redondeado a 1) degeneraría el origen
        origin = np.clip(origin, np.finfo(float).tiny, np.finfo(float).max)
        return _scalar_or_array(origin, u)

    def sample_origin_posterior(self, n: int, p: float, i: int, rng: RandomStream) -> float:
        """T_or bajo el prior g_i condicionado a n individuos (consume una uniforme)"""
        self._check_prior(n, i)
        if p <= 0:
            raise DomainError("Se requiere p > 0")
        return self.origin_from_uniform(n, p, i, rng.uniform())

    def posterior_density(self, n: int, p: float, i: int, t: ArrayLike):
        """h_n^(i)(t) = p n C(n-1,i) (pt)^{n-i-1} / (1+pt)^{n+1}, en espacio logarítmico"""
        self._check_prior(n, i)
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("La densidad posterior requiere t >= 0")
        pt = p * t
        log_h = (
            math.log(p) + math.log(n) + log_binomial(n - 1, i)
            + xlogy(n - i - 1, pt) - (n + 1) * np.log1p(pt)
        )
        return _scalar_or_array(np.exp(log_h), t)

    def posterior_cdf(self, n: int, p: float, i: int, t: ArrayLike):
        """P(T_or <= t) = I_y(n-i, i+1) con y = pt/(1+pt)"""
        self._check_prior(n, i)
        t = np.asarray(t, dtype=float)
        pt = p * np.maximum(t, 0.0)
        return _scalar_or_array(betainc(n - i, i + 1, pt / (1.0 + pt)), t)

    def mode_posterior(self, n: int, p: float, i: int) -> float:
        self._check_prior(n, i)
        return max(n - i - 1, 0) / ((i + 2) * p)

    # ===== GENEALOGÍAS =====

    def sample_genealogy(self, params: ModelParams, origin: Origin, rng: RandomStream) -> Genealogy:
        """Una genealogía de n individuos bajo la condición de origen dada"""
        n, p = params.n, params.p
        if n < 2:
            raise DomainError("Una genealogía requiere n >= 2")
        if isinstance(origin, FixedTime):
            depths = self.quantile_depth_fixed_t(rng.uniforms(n - 1), p, origin.t)
            return Genealogy(origin=origin.t, depths=depths)
        if isinstance(origin, InfiniteTime):
            depths = self.quantile_depth_infinite(rng.uniforms(n - 1), p)
            return Genealogy(origin=math.inf, depths=depths)
        if isinstance(origin, PowerPrior):
            t_or = self.sample_origin_posterior(n, p, origin.i, rng)
            depths = self.quantile_depth_fixed_t(rng.uniforms(n - 1), p, t_or)
            return Genealogy(origin=t_or, depths=depths)
        raise DomainError(f"Condición de origen no soportada: {origin!r}")

    def _batch_rows(self, params: ModelParams, origin: Origin, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        p = params.p
        rows = u.shape[0]
        if isinstance(origin, FixedTime):
            return np.full(rows, origin.t), self.quantile_depth_fixed_t(u, p, origin.t)
        if isinstance(origin, InfiniteTime):
            return np.full(rows, math.inf), self.quantile_depth_infinite(u, p)
        # Primera columna: origen; resto: profundidades dado el origen de la fila
        origins = np.asarray(self.origin_from_uniform(params.n, p, origin.i, u[:, 0]), dtype=float)
        tau = (p * origins)[:, None]
        depths = np.minimum(
            u[:, 1:] * origins[:, None] / (1.0 + tau * (1.0 - u[:, 1:])), origins[:, None]
        )
        return origins, depths

    def sample_genealogies(
        self, params: ModelParams, origin: Origin, rng: RandomStream, size: int
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Lote de ``size`` genealogías: (orígenes de forma (size,), profundidades (size, n-1)).
        Consume el flujo en el mismo orden que ``size`` llamadas a sample_genealogy.
        """
        n = params.n
        if n < 2:
            raise DomainError("Una genealogía requiere n >= 2")
        if size < 0:
            raise DomainError("El tamaño del lote debe ser no negativo")
        if isinstance(origin, PowerPrior):
            self._check_prior(n, origin.i)
            width = n
        else:
            width = n - 1
        chunk = max(1, _BATCH_UNIFORMS // width)
        origins = np.empty(size)
        depths = np.empty((size, n - 1))
        for start in range(0, size, chunk):
            stop = min(size, start + chunk)
            u = rng.uniforms((stop - start, width))
            origins[start:stop], depths[start:stop] = self._batch_rows(params, origin, u)
        return origins, depths

    @staticmethod
    def order_stats(depths: np.ndarray, k: int) -> np.ndarray:
        """Los k mayores valores en orden decreciente (T_{n,1} >= ... >= T_{n,k}), por fila"""
        depths = np.asarray(depths, dtype=float)
        size = depths.shape[-1]
        if not 1 <= k <= size:
            raise DomainError(f"El rango k debe estar en [1, {size}]")
        top = np.partition(depths, size - k, axis=-1)[..., size - k:]
        return np.flip(np.sort(top, axis=-1), axis=-1)

    # ===== ESTADÍSTICOS DE ORDEN =====

    @staticmethod
    def _check_rank(n: int, k: int) -> None:
        if not 1 <= k <= n - 1:
            raise DomainError(f"El rango k debe estar en [1, n-1] (n={n}, k={k})")

    def order_stat_density_fixed_t(self, n: int, k: int, p: float, t: float, s: ArrayLike):
        """Densidad f_{n,k}^t del k-ésimo mayor entre n-1 profundidades a origen fijo"""
        self._check_rank(n, k)
        s = np.asarray(s, dtype=float)
        if np.any(s < 0):
            raise DomainError("La densidad requiere s >= 0")
        inside = s <= t
        ps = p * np.where(inside, s, 0.0)
        pt = p * t
        log_f = (
            math.log(p) + math.log(n - k) + log_binomial(n - 1, n - k)
            + xlogy(n - k - 1, ps) - n * np.log1p(ps)
            + (n - k) * math.log1p(pt) - (n - 1) * math.log(pt)
            + xlogy(k - 1, pt - ps)
        )
        return _scalar_or_array(np.where(inside, np.exp(log_f), 0.0), s)

    def _fixed_time_moment(self, n: int, k: int, m: int, y: float, rel_tol: Optional[float]) -> float:
        """
        E_t[T_{n,k}^m] a p = 1 con y = t/(1+t). Con w = ps/(1+ps) = y z queda
        (n-k) C(n-1,n-k) y^m int_0^1 z^{n-k-1+m} (1-z)^{k-1} (1-yz)^{-m} dz,
        un integrando acotado para todo y < 1.
        """
        if y <= 0.0:
            return 0.0
        log_const = math.log(n - k) + log_binomial(n - 1, n - k) + m * math.log(y)

        def integrand(z: float) -> float:
            if z <= 0.0 or z >= 1.0:
                return 0.0
            log_f = (
                log_const + (n - k - 1 + m) * math.log(z) + (k - 1) * math.log1p(-z)
                - m * math.log1p(-y * z)
            )
            return math.exp(log_f)

        return quadrature(integrand, 0.0, 1.0, rel_tol)

    def moment_order_stat_quadrature(
        self, i: int, n: int, k: int, m: int, p: float, rel_tol: Optional[float] = None
    ) -> ExtendedReal:
        """
        E^(i)[T_{n,k}^m] mezclando el momento a origen fijo con la posterior h_n^(i),
        escrito en y = pt/(1+pt) ~ Beta(n-i, i+1). Infinito si m > k+i.
        """
        self._check_rank(n, k)
        self._check_prior(n, i)
        if m < 1:
            raise DomainError("El orden del momento debe ser m >= 1")
        if m > k + i:
            return ExtendedReal.inf()
        log_beta_const = math.log(n) + log_binomial(n - 1, i)

        def integrand(y: float) -> float:
            if y <= 0.0 or y >= 1.0:
                return 0.0
            weight = math.exp(log_beta_const + (n - i - 1) * math.log(y) + i * math.log1p(-y))
            return weight * self._fixed_time_moment(n, k, m, y, rel_tol)

        value = quadrature(integrand, 0.0, 1.0, rel_tol)
        return ExtendedReal.of(value / p ** m)

    def moment_order_stat(self, regime: Origin, n: int, k: int, m: int, p: float) -> ExtendedReal:
        """m-ésimo momento de T_{n,k}; +inf cuando no es finito"""
        self._check_rank(n, k)
        if m < 1:
            raise DomainError("El orden del momento debe ser m >= 1")
        if p <= 0:
            raise DomainError("Se requiere p > 0")
        if isinstance(regime, InfiniteTime):
            if m > k - 1:
                return ExtendedReal.inf()
            return ExtendedReal.of(binomial(n - k + m - 1, m) / (p ** m * binomial(k - 1, m)))
        if isinstance(regime, PowerPrior):
            if regime.i == 0:
                if m > k:
                    return ExtendedReal.inf()
                return ExtendedReal.of(binomial(n - k + m - 1, m) / (p ** m * binomial(k, m)))
            self.logger.debug("moment_quadrature", n=n, k=k, m=m, i=regime.i)
            return self.moment_order_stat_quadrature(regime.i, n, k, m, p)
        if isinstance(regime, FixedTime):
            tau = p * regime.t
            return ExtendedReal.of(self._fixed_time_moment(n, k, m, tau / (1.0 + tau), None) / p ** m)
        raise DomainError(f"Condición de origen no soportada: {regime!r}")

    def order_stat_moment(self, regime: Origin, n: int, k: int, m: int, p: float) -> OrderStatMoment:
        """moment_order_stat junto con la condición de origen y los índices"""
        value = self.moment_order_stat(regime, n, k, m, p)
        return OrderStatMoment(regime=regime, k=k, m=m, value=value)


cpp_sampler = CPPSampler()

# cppgen/services/sfs_service.py
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import beta as beta_dist

from cppgen.core.exceptions import DomainError, UnsupportedRegimeError
from cppgen.core.numeric import binomial, ent_bracket_scaled, harmonic, quadrature
from cppgen.core.random import RandomStream
from cppgen.schemas.base_schema import ExtendedReal
from cppgen.schemas.genealogy_schema import Genealogy, MutationEvent, MutationRecord, SiteFrequencySpectrum
from cppgen.schemas.params_schema import FixedTime, InfiniteTime, Origin, PowerPrior

from .base_service import BaseService
from .cpp_service import cpp_sampler

# Por debajo de este tau los tres términos de la forma cerrada se cancelan
SMALL_TAU = 0.05
CROSS_CHECK_TOLERANCE = 1e-6

METHOD_CLOSED_FORM = "closed_form"
METHOD_QUADRATURE = "quadrature"
METHOD_INFINITE = "infinite"


class MutationSFS(BaseService):
    """
    Mutaciones poissonianas sobre el proceso puntual coalescente y espectro
    de frecuencias de sitios, empírico y esperado.

    **Regla de portadores**
    Una mutación en la rama j al tiempo ell la llevan los individuos
    j, j+1, ..., j+r-1, donde r-1 es la cantidad de profundidades consecutivas
    H*_{j+1}, H*_{j+2}, ... menores que ell (H*_n = +inf corta la racha).
    """

    def __init__(self):
        super().__init__(__name__)

    # ===== MUTACIONES =====

    @staticmethod
    def _branch_lengths(g: Genealogy) -> np.ndarray:
        """Longitudes de las ramas 0..n-1; la rama 0 vale 0 si el origen es infinito"""
        root = g.origin if g.has_finite_origin else 0.0
        return np.concatenate(([root], g.depths))

    def place_mutations(self, g: Genealogy, theta: float, rng: RandomStream) -> MutationRecord:
        """Poisson(theta H*_j) mutaciones por rama, tiempos uniformes en (0, H*_j)"""
        if theta < 0:
            raise DomainError("La tasa de mutación debe ser theta >= 0")
        excluded = not g.has_finite_origin
        if theta == 0:
            return MutationRecord(events=[], root_branch_excluded=excluded)
        lengths = self._branch_lengths(g)
        counts = rng.poisson(theta * lengths)
        events = []
        for branch in np.flatnonzero(counts):
            u = rng.uniforms(int(counts[branch]))
            for time in self._mutation_times(lengths[branch], u):
                events.append(MutationEvent(branch=int(branch), time=float(time)))
        return MutationRecord(events=events, root_branch_excluded=excluded)

    @staticmethod
    def _mutation_times(length: float, u: np.ndarray) -> np.ndarray:
        """Tiempos en el abierto (0, length): 1-u está en (0,1] y el borde superior se corre un ulp"""
        return np.minimum(length * (1.0 - u), np.nextafter(length, 0.0))

    @staticmethod
    def _following_prefix_max(depths: np.ndarray, branch: int) -> np.ndarray:
        # max{H*_{j+1}, ..., H*_{j+q}} para q = 1, 2, ...
        return np.maximum.accumulate(depths[branch:]) if branch < depths.size else depths[:0]

    def carrier_count(self, g: Genealogy, ev: MutationEvent) -> int:
        """Número de individuos que llevan la mutación"""
        if ev.branch > g.depths.size:
            raise DomainError(f"La rama {ev.branch} no existe para n = {g.n}")
        if ev.branch == 0 and not g.has_finite_origin:
            raise DomainError("La rama 0 no existe con origen infinito")
        prefix = self._following_prefix_max(g.depths, ev.branch)
        return 1 + int(np.searchsorted(prefix, ev.time, side="left"))

    def compute_sfs(self, g: Genealogy, events) -> SiteFrequencySpectrum:
        """xi_k = mutaciones con k portadores; las de n portadores cuentan como fijadas"""
        n = g.n
        xi = np.zeros(n - 1, dtype=np.int64)
        fixed = 0
        for ev in events:
            carriers = self.carrier_count(g, ev)
            if carriers == n:
                fixed += 1
            else:
                xi[carriers - 1] += 1
        return SiteFrequencySpectrum.from_counts(xi, fixed=fixed)

    def simulate_sfs(self, g: Genealogy, theta: float, rng: RandomStream) -> SiteFrequencySpectrum:
        """place_mutations seguido de compute_sfs, vectorizado por rama"""
        if theta < 0:
            raise DomainError("La tasa de mutación debe ser theta >= 0")
        n = g.n
        xi = np.zeros(n + 1, dtype=np.int64)
        if theta > 0:
            lengths = self._branch_lengths(g)
            counts = rng.poisson(theta * lengths)
            for branch in np.flatnonzero(counts):
                times = self._mutation_times(lengths[branch], rng.uniforms(int(counts[branch])))
                prefix = self._following_prefix_max(g.depths, int(branch))
                carriers = 1 + np.searchsorted(prefix, times, side="left")
                xi += np.bincount(carriers, minlength=n + 1)
        return SiteFrequencySpectrum.from_counts(xi[1:n], fixed=int(xi[n]))

    # ===== ESPECTRO ESPERADO: ORIGEN FIJO =====

    @staticmethod
    def _check_rank(n: int, k: int) -> None:
        if n < 2 or not 1 <= k <= n - 1:
            raise DomainError(f"El espectro requiere 1 <= k <= n-1 (n={n}, k={k})")

    @staticmethod
    def _check_rates(theta: float, p: float) -> None:
        if theta < 0:
            raise DomainError("La tasa de mutación debe ser theta >= 0")
        if p <= 0:
            raise DomainError("Se requiere p > 0")

    def expected_sfs_fixed_time(self, n: int, k: int, theta: float, p: float, t: float) -> float:
        """E_n^t(xi_k) en forma cerrada; cuadratura para tau < 0.05"""
        self._check_rank(n, k)
        self._check_rates(theta, p)
        if t <= 0:
            raise DomainError("Se requiere t > 0")
        tau = p * t
        if tau < SMALL_TAU:
            return self.expected_sfs_fixed_time_quadrature(n, k, theta, p, t)
        poly = 2.0 * tau ** 2 - 2.0 * (n - 2 * k - 1) * tau - (n - k - 1) * (k + 1)
        value = (
            (n - 3 * k - 1) / k
            + (n - k - 1) * (k + 1) / (k * tau)
            + poly / tau ** 2 * ent_bracket_scaled(k, tau)
        )
        if value < 0.0:
            # Solo por redondeo; un negativo apreciable indica cancelación
            self.logger.warning("sfs_negative_closed_form", n=n, k=k, tau=tau, value=value)
            value = 0.0
        return theta / p * value

    def expected_sfs_fixed_time_quadrature(self, n: int, k: int, theta: float, p: float, t: float) -> float:
        """
        theta [(n-k-1) Q + 2 R] con Q = int_0^t F^{k-1}(1-F)^2 y R = int_0^t F^{k-1}(1-F),
        F la CDF de una profundidad a origen fijo. Integrado en v = x/t.
        """
        self._check_rank(n, k)
        self._check_rates(theta, p)
        if t <= 0:
            raise DomainError("Se requiere t > 0")
        tau = p * t

        def cdf(v: float) -> float:
            return min(1.0, v * (1.0 + tau) / (1.0 + tau * v))

        def q_integrand(v: float) -> float:
            f = cdf(v)
            return f ** (k - 1) * (1.0 - f) ** 2

        def r_integrand(v: float) -> float:
            f = cdf(v)
            return f ** (k - 1) * (1.0 - f)

        r_value = t * quadrature(r_integrand, 0.0, 1.0)
        q_value = t * quadrature(q_integrand, 0.0, 1.0) if n - k - 1 > 0 else 0.0
        return theta * ((n - k - 1) * q_value + 2.0 * r_value)

    # ===== ESPECTRO ESPERADO: PRIORS =====

    def expected_sfs_prior1_closed(self, n: int, k: int, theta: float, p: float) -> float:
        """E_n^(1)(xi_k) con números armónicos, válida para k <= n-3"""
        self._check_rank(n, k)
        if k > n - 3:
            raise UnsupportedRegimeError(
                f"La forma cerrada bajo g_1 requiere k <= n-3 (n={n}, k={k})",
                fallback="expected_sfs_quadrature",
            )
        factor = n * (n - 1) / ((n - k) * (n - k - 2))
        bracket = (n + k - 2) / k - 2.0 * (n - 1) / (n - k - 1) * (harmonic(n - 1) - harmonic(k))
        return theta / p * factor * bracket

    def expected_sfs_quadrature(self, i: int, n: int, k: int, theta: float, p: float) -> float:
        """int E_n^t(xi_k) h_n^(i)(t) dt con y = pt/(1+pt) ~ Beta(n-i, i+1)"""
        self._check_rank(n, k)
        self._check_rates(theta, p)
        if not 0 <= i < n:
            raise DomainError(f"El prior g_i requiere 0 <= i < n (n={n}, i={i})")
        weight = beta_dist(n - i, i + 1)

        def integrand(y: float) -> float:
            if y <= 0.0 or y >= 1.0:
                return 0.0
            return weight.pdf(y) * self.expected_sfs_fixed_time(n, k, 1.0, 1.0, y / (1.0 - y))

        return theta / p * quadrature(integrand, 0.0, 1.0)

    def expected_sfs_with_method(
        self, regime: Origin, n: int, k: int, theta: float, p: float
    ) -> Tuple[ExtendedReal, str]:
        """(valor, método) del espectro esperado bajo cualquier condición de origen"""
        self._check_rank(n, k)
        self._check_rates(theta, p)
        if isinstance(regime, FixedTime):
            return ExtendedReal.of(self.expected_sfs_fixed_time(n, k, theta, p, regime.t)), METHOD_CLOSED_FORM
        if isinstance(regime, InfiniteTime):
            return ExtendedReal.inf(), METHOD_INFINITE
        if not isinstance(regime, PowerPrior):
            raise DomainError(f"Condición de origen no soportada: {regime!r}")
        if not regime.i < n:
            raise DomainError(f"El prior g_i requiere i < n (n={n}, i={regime.i})")
        if regime.i == 0:
            return ExtendedReal.of(n * theta / (k * p)), METHOD_CLOSED_FORM
        if regime.i == 1 and k <= n - 3:
            value = self.expected_sfs_prior1_closed(n, k, theta, p)
            if k == n - 3:
                self._cross_check_boundary(n, k, theta, p, value)
            return ExtendedReal.of(value), METHOD_CLOSED_FORM
        self.logger.info("sfs_quadrature_fallback", n=n, k=k, i=regime.i)
        return ExtendedReal.of(self.expected_sfs_quadrature(regime.i, n, k, theta, p)), METHOD_QUADRATURE

    def _cross_check_boundary(self, n: int, k: int, theta: float, p: float, value: float) -> None:
        reference = self.expected_sfs_quadrature(1, n, k, theta, p)
        scale = max(abs(reference), abs(value))
        if scale and abs(value - reference) > CROSS_CHECK_TOLERANCE * scale:
            self.logger.warning(
                "sfs_boundary_discrepancy", n=n, k=k, closed_form=value, quadrature=reference
            )

    def expected_sfs(self, regime: Origin, n: int, k: int, theta: float, p: float) -> ExtendedReal:
        """
        E(xi_k): forma cerrada a origen fijo, +inf con origen infinito,
        n theta/(kp) bajo g_0 y la fórmula armónica bajo g_1 (cuadratura
        para k >= n-2). Bajo g_i con i >= 2 no hay forma cerrada.
        """
        if isinstance(regime, PowerPrior) and regime.i >= 2:
            self._check_rank(n, k)
            raise UnsupportedRegimeError(
                f"No hay forma cerrada de E(xi_k) bajo g_{regime.i}",
                fallback="expected_sfs_quadrature",
            )
        value, _ = self.expected_sfs_with_method(regime, n, k, theta, p)
        return value

    # ===== TIEMPOS ENTRE COALESCENCIAS =====

    def expected_coalescence_gaps(self, n: int, p: float) -> np.ndarray:
        """E[Delta_j] para j = 2..n (índice 0 del arreglo = j 2) bajo g_0"""
        uniform = PowerPrior(i=0)
        means = [0.0] * (n + 1)
        for j in range(1, n):
            means[j] = float(cpp_sampler.moment_order_stat(uniform, n, j, 1, p))
        return np.array([means[j - 1] - means[j] for j in range(2, n + 1)])

    def expected_sfs_via_branch_times(self, i: int, n: int, k: int, theta: float, p: float) -> float:
        """E(xi_k) a partir de las esperanzas de los tiempos entre coalescencias"""
        if i != 0:
            raise UnsupportedRegimeError(
                "La vía por tiempos de rama requiere el prior g_0", fallback="expected_sfs_quadrature"
            )
        self._check_rank(n, k)
        self._check_rates(theta, p)
        gaps = self.expected_coalescence_gaps(n, p)
        total = 0.0
        for j in range(2, n - k + 2):
            total += binomial(j, 2) * binomial(n - j, k - 1) * gaps[j - 2]
        return theta * 2.0 / k / binomial(n - 1, k) * total

    def expected_total_branch_length_uniform_prior(self, n: int, p: float) -> float:
        """sum_j j E[Delta_j] bajo g_0 (sin la rama del origen)"""
        if n < 2:
            raise DomainError("Se requiere n >= 2")
        gaps = self.expected_coalescence_gaps(n, p)
        return float(np.dot(np.arange(2, n + 1), gaps))

    # ===== ESPECTRO NORMALIZADO =====

    @staticmethod
    def normalized_sfs_limit(n: int) -> float:
        """Límite de E(xi_k)/E(S) cuando t -> inf"""
        if n < 2:
            raise DomainError("Se requiere n >= 2")
        return 1.0 / (n - 1)

    def expected_sfs_vector(
        self, regime: Origin, n: int, theta: float, p: float
    ) -> List[Tuple[ExtendedReal, str]]:
        """(E xi_k, método) para k = 1..n-1; g_i con i >= 2 va por cuadratura"""
        if isinstance(regime, PowerPrior) and regime.i >= 2:
            self._check_rates(theta, p)
            return [
                (ExtendedReal.of(self.expected_sfs_quadrature(regime.i, n, k, theta, p)), METHOD_QUADRATURE)
                for k in range(1, n)
            ]
        return [self.expected_sfs_with_method(regime, n, k, theta, p) for k in range(1, n)]

    def normalized_sfs(self, regime: Origin, n: int, theta: float, p: float) -> Optional[np.ndarray]:
        """E(xi_k)/E(S); None cuando alguna esperanza es infinita o todas son nulas"""
        values = [value for value, _ in self.expected_sfs_vector(regime, n, theta, p)]
        if any(not value.is_finite for value in values):
            return None
        array = np.array([float(value) for value in values])
        total = array.sum()
        if total <= 0:
            return None
        return array / total

    @staticmethod
    def limit_sfs(alpha: float, theta: float, k: int) -> float:
        """Espectro del régimen límite p = n/alpha: alpha theta / k"""
        if alpha <= 0 or theta < 0 or k < 1:
            raise DomainError("Se requiere alpha > 0, theta >= 0 y k >= 1")
        return alpha * theta / k


mutation_sfs = MutationSFS()

# cppgen/services/oracle_service.py
import math
from typing import Optional, Tuple

import numpy as np

from cppgen.config import get_settings
from cppgen.core.exceptions import AttemptsExhaustedError, DomainError, SimulationCapError
from cppgen.core.random import RandomStream
from cppgen.schemas.genealogy_schema import Genealogy, OracleBatch, OracleTelemetry, PopulationCPP, SampleIndices

from .base_service import BaseService

DRAW_CAP = 10 ** 9
LOW_ACCEPTANCE_RATE = 1e-3


class ForwardOracle(BaseService):
    """
    Construcción hacia adelante de la genealogía condicionada: profundidades
    i.i.d. de la población, saltos geométricos de muestreo y rechazo sobre
    el tamaño de muestra.

    **Indexado**
    * Profundidades 1-basadas H_1..H_{pop_size-1}, guardadas en ``depths[0..]``.
    * H*_i es el máximo de H_{I_i}, ..., H_{I_{i+1}-1}: el bloque entre los
      individuos muestreados I_i e I_{i+1}.
    """

    def __init__(self):
        super().__init__(__name__)

    # ===== POBLACIÓN =====

    def simulate_population_cpp(self, N: float, t: float, rng: RandomStream) -> PopulationCPP:
        """Sorteos H = U/(N(1-U)) hasta el primero que supera t"""
        if N <= 0 or t <= 0:
            raise DomainError("Se requiere N > 0 y t > 0")
        chunk = int(min(max(16.0, 2.0 * (1.0 + N * t)), 1 << 20))
        kept = []
        drawn = 0
        while True:
            u = rng.uniforms(chunk)
            heights = u / (N * (1.0 - u))
            above = np.flatnonzero(heights > t)
            if above.size:
                stop = int(above[0])
                kept.append(heights[:stop])
                depths = np.concatenate(kept)
                return PopulationCPP(depths=depths, pop_size=depths.size + 1)
            kept.append(heights)
            drawn += chunk
            if drawn >= DRAW_CAP:
                raise SimulationCapError(f"La población superó {DRAW_CAP} sorteos (N={N}, t={t})")

    def draw_sample_indices(self, q: float, count: int, rng: RandomStream) -> SampleIndices:
        """I_1 < ... < I_count con saltos geométricos ceil(ln U / ln(1-q)) >= 1"""
        if not 0 < q < 1:
            raise DomainError("La probabilidad de muestreo p/N debe estar en (0,1)")
        u = 1.0 - rng.uniforms(count)
        gaps = np.maximum(1, np.ceil(np.log(u) / math.log1p(-q))).astype(np.int64)
        return SampleIndices(indices=np.cumsum(gaps))

    @staticmethod
    def sample_depths(population: PopulationCPP, indices: np.ndarray, n: int) -> np.ndarray:
        """H*_i = max{H_{I_i}, ..., H_{I_{i+1}-1}} para i = 1..n-1"""
        # Bloque i en depths[I_i - 1 : I_{i+1} - 1]; todos no vacíos
        starts = np.asarray(indices[: n - 1], dtype=np.int64) - 1
        end = int(indices[n - 1]) - 1
        return np.maximum.reduceat(population.depths[:end], starts)

    # ===== RECHAZO =====

    def _attempt(self, N: float, p: float, t: float, n: int, rng: RandomStream) -> Optional[np.ndarray]:
        population = self.simulate_population_cpp(N, t, rng)
        indices = self.draw_sample_indices(p / N, n + 1, rng).indices
        if indices[n - 1] <= population.pop_size < indices[n]:
            return self.sample_depths(population, indices, n)
        return None

    @staticmethod
    def _check(N: float, p: float, t: float, n: int) -> None:
        if n < 2:
            raise DomainError("El oráculo requiere n >= 2")
        if not 0 < p < N:
            raise DomainError("El oráculo requiere 0 < p < N")
        if t <= 0:
            raise DomainError("El oráculo requiere t > 0")

    def sample_conditioned_genealogies(
        self,
        N: float,
        p: float,
        t: float,
        n: int,
        rng: RandomStream,
        size: int = 1,
        max_attempts: Optional[int] = None,
    ) -> OracleBatch:
        """``size`` genealogías aceptadas; max_attempts acota el total de intentos del lote"""
        self._check(N, p, t, n)
        if max_attempts is None:
            max_attempts = get_settings().max_attempts
        accepted = []
        attempts = 0
        while len(accepted) < size:
            if attempts >= max_attempts:
                raise AttemptsExhaustedError(attempts, len(accepted))
            attempts += 1
            depths = self._attempt(N, p, t, n, rng)
            if depths is not None:
                accepted.append(depths)

        telemetry = OracleTelemetry(attempts=attempts, accepted=len(accepted))
        self.logger.debug(
            "oracle_telemetry", attempts=attempts, accepted=telemetry.accepted,
            acceptance_rate=telemetry.acceptance_rate,
        )
        if size and telemetry.acceptance_rate < LOW_ACCEPTANCE_RATE:
            self.logger.warning(
                "oracle_low_acceptance", acceptance_rate=telemetry.acceptance_rate, N=N, p=p, t=t, n=n
            )
        matrix = np.array(accepted).reshape(size, n - 1)
        return OracleBatch(depths=matrix, origin=t, telemetry=telemetry, origin_label=f"fixed:{t!r}")

    def sample_conditioned_genealogy(
        self, N: float, p: float, t: float, n: int, rng: RandomStream, max_attempts: Optional[int] = None
    ) -> Genealogy:
        batch = self.sample_conditioned_genealogies(N, p, t, n, rng, size=1, max_attempts=max_attempts)
        return Genealogy(origin=t, depths=batch.depths[0])

    def event_frequency(
        self, N: float, p: float, t: float, n: int, rng: RandomStream, attempts: int
    ) -> Tuple[int, int]:
        """
        (aciertos, intentos) del evento {I_n <= pop_size < I_{n+1}}. Cada intento ya
        condiciona a la supervivencia, así que la frecuencia estima acceptance_probability.
        """
        self._check(N, p, t, n)
        hits = sum(self._attempt(N, p, t, n, rng) is not None for _ in range(attempts))
        return hits, attempts

    # ===== PROBABILIDADES EXACTAS =====

    @staticmethod
    def survival_probability(N: float, t: float) -> float:
        """P^t(pop_size >= 1) = 1/(1+Nt)"""
        return 1.0 / (1.0 + N * t)

    @staticmethod
    def acceptance_probability(N: float, p: float, t: float, n: int) -> float:
        """Probabilidad de aceptación por intento, condicionada a la supervivencia"""
        tau = p * t
        return (1.0 + N * t) / (N * t) / (1.0 + tau) * (tau / (1.0 + tau)) ** n

    def event_probability(self, N: float, p: float, t: float, n: int) -> float:
        """
        Probabilidad sin condicionar del evento: supervivencia por aceptación.
        Incluye la extinción, que simulate_population_cpp nunca devuelve.
        """
        return self.acceptance_probability(N, p, t, n) * self.survival_probability(N, t)

    # ===== DIVERGENCIAS =====

    @staticmethod
    def divergence_matrix(depths) -> np.ndarray:
        """D[i][j] = max de las profundidades entre los individuos i y j"""
        depths = np.asarray(depths, dtype=float).reshape(-1)
        if depths.size == 0:
            raise DomainError("La matriz de divergencias requiere al menos una profundidad")
        n = depths.size + 1
        matrix = np.zeros((n, n))
        for i in range(n - 1):
            matrix[i, i + 1:] = np.maximum.accumulate(depths[i:])
        return np.maximum(matrix, matrix.T)


forward_oracle = ForwardOracle()

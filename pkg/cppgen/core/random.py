# cppgen/core/random.py
"""
Flujos aleatorios reproducibles.

Cada réplica usa su propio flujo, derivado de (semilla, índice) con
``numpy.random.SeedSequence``; así los resultados no dependen del número de
hilos ni del orden de ejecución.
"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np

Shape = Union[int, Tuple[int, ...]]


class RandomStream:
    """Envoltorio de ``numpy.random.Generator`` con partición documentada"""

    def __init__(self, seed: int = 0, spawn_key: Sequence[int] = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    # ===== PARTICIÓN =====

    def split(self, index: int) -> "RandomStream":
        """Flujo hijo para la réplica ``index``: SeedSequence(seed, spawn_key + (index,))"""
        if index < 0:
            raise ValueError("El índice de partición debe ser no negativo")
        return RandomStream(self.seed, self.spawn_key + (index,))

    @classmethod
    def for_replicate(cls, seed: int, index: int) -> "RandomStream":
        return cls(seed).split(index)

    # ===== SORTEOS =====

    def uniforms(self, size: Optional[Shape] = None):
        """Uniformes en [0,1); el orden de consumo es fila por fila"""
        return self.generator.random(size)

    def uniform(self) -> float:
        return float(self.generator.random())

    def poisson(self, lam, size: Optional[Shape] = None):
        return self.generator.poisson(lam, size)

    def exponentials(self, rate: float, size: Optional[Shape] = None):
        """Exponenciales de tasa ``rate`` por inversión"""
        u = self.generator.random(size)
        return -np.log1p(-u) / rate

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, spawn_key={self.spawn_key})"

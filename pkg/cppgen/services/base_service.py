# cppgen/services/base_service.py
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

from cppgen.config import get_settings
from cppgen.core.logging import get_logger
from cppgen.core.random import RandomStream

ResultType = TypeVar("ResultType")


class BaseService:
    """
    Servicio base con utilidades comunes.

    **Réplicas**
    * Cada réplica ``r`` recibe ``RandomStream.for_replicate(seed, r)``.
    * El resultado no depende del número de hilos: se devuelve en orden de índice.
    """

    def __init__(self, name: str):
        self.logger = get_logger(name)

    @staticmethod
    def resolve_threads(threads: Optional[int] = None) -> int:
        """Hilos: argumento explícito, si no CPPGEN_THREADS"""
        if threads is None:
            threads = get_settings().threads
        return max(1, int(threads))

    def map_replicates(
        self,
        func: Callable[[int, RandomStream], ResultType],
        seed: int,
        replicates: int,
        threads: Optional[int] = None,
    ) -> List[ResultType]:
        """Ejecutar func(índice, flujo) para cada réplica"""
        threads = self.resolve_threads(threads)
        def run(index: int) -> ResultType:
            return func(index, RandomStream.for_replicate(seed, index))

        if threads == 1 or replicates <= 1:
            return [run(index) for index in range(replicates)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, range(replicates)))

# cppgen/services/__init__.py

# Servicio base
from .base_service import BaseService

# Muestreo exacto y oráculo
from .cpp_service import cpp_sampler
from .oracle_service import forward_oracle

# Espectro de frecuencias
from .sfs_service import mutation_sfs

# Objetos límite y estadística
from .stats_service import statistical_tests
from .limit_service import limit_objects

# Suite de aceptación
from .verification_service import verification_suite

__all__ = [
    "BaseService",
    "cpp_sampler",
    "forward_oracle",
    "mutation_sfs",
    "statistical_tests",
    "limit_objects",
    "verification_suite",
]

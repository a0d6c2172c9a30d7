# cppgen/schemas/__init__.py

# Schemas base
from .base_schema import DomainModel, ExtendedReal, as_float_array

# Parámetros y condiciones de origen
from .params_schema import (
    ModelParams, FixedTime, InfiniteTime, PowerPrior,
    Origin, OriginCondition, parse_origin
)

# Genealogías, mutaciones y oráculo
from .genealogy_schema import (
    Genealogy, OrderStatMoment,
    MutationEvent, MutationRecord, SiteFrequencySpectrum,
    PopulationCPP, SampleIndices, OracleTelemetry, OracleBatch
)

# Objetos límite
from .measure_schema import PointMeasure2D, LimitOrigin

# Reportes
from .report_schema import StatTestResult, CriterionResult, LimitCheckReport, VerificationReport

# Configuración de comandos
from .config_schema import RunConfig, ModelRunConfig, SimulateConfig, SfsConfig, FigConfig, VerifyConfig

__all__ = [
    "DomainModel", "ExtendedReal", "as_float_array",
    "ModelParams", "FixedTime", "InfiniteTime", "PowerPrior",
    "Origin", "OriginCondition", "parse_origin",
    "Genealogy", "OrderStatMoment",
    "MutationEvent", "MutationRecord", "SiteFrequencySpectrum",
    "PopulationCPP", "SampleIndices", "OracleTelemetry", "OracleBatch",
    "PointMeasure2D", "LimitOrigin",
    "StatTestResult", "CriterionResult", "LimitCheckReport", "VerificationReport",
    "RunConfig", "ModelRunConfig", "SimulateConfig", "SfsConfig", "FigConfig", "VerifyConfig",
]

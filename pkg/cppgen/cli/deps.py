# cppgen/cli/deps.py
import contextlib
import csv
import math
import sys
from pathlib import Path
from typing import Iterator, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from cppgen.config import get_settings
from cppgen.core.exceptions import DomainError

ConfigType = TypeVar("ConfigType", bound=BaseModel)


# ===== VALIDACIÓN DE PARÁMETROS =====

def build_config(config_cls: Type[ConfigType], **values) -> ConfigType:
    """Construye la configuración del comando; los errores de pydantic pasan a DomainError"""
    clean = {key: value for key, value in values.items() if value is not None}
    try:
        return config_cls(**clean)
    except ValidationError as exc:
        messages = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in exc.errors()
        )
        raise DomainError(f"Parámetros inválidos: {messages}") from exc


# ===== SERIALIZACIÓN =====

def format_float(value) -> str:
    """17 cifras significativas; +inf como 'inf'"""
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{get_settings().float_digits}g")


@contextlib.contextmanager
def open_output(path: Optional[Path]) -> Iterator:
    """Archivo de salida o stdout si no hay ruta"""
    if path is None:
        yield sys.stdout
        return
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        yield handle


def csv_writer(handle):
    return csv.writer(handle, lineterminator="\n")

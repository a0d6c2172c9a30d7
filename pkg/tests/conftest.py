# tests/conftest.py
import pytest

from cppgen.config import get_settings
from cppgen.core.random import RandomStream


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: pruebas estadísticas de mayor tamaño")


@pytest.fixture
def rng():
    return RandomStream(20240607)


@pytest.fixture
def fresh_settings():
    """Limpia la caché de configuración antes y después de la prueba"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()

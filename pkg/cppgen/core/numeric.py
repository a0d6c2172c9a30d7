# cppgen/core/numeric.py
"""
Núcleos numéricos compartidos: números armónicos, binomiales, integrales
I_{k,l} y J_{k,l}, y el corchete logarítmico del espectro esperado a tiempo
de origen fijo en sus dos variantes (directa y por serie de cola).
"""
import math

import numpy as np
from scipy.special import gammaln

from cppgen.core.exceptions import DomainError
from cppgen.schemas.base_schema import ExtendedReal

EXACT_BINOMIAL_LIMIT = 60
TAIL_RELATIVE_CUTOFF = 1e-18
# Umbral y = x/(1+x) hasta el cual I_{k,0} e I_{k,1} se evalúan por serie
SERIES_Y_LIMIT = 0.9
_CHUNK = 4096


# ===== ARMÓNICOS Y BINOMIALES =====

def harmonic(k: int) -> float:
    """H_k = sum_{j=1}^k 1/j, sumado en orden ascendente (H_0 = 0)"""
    if k < 0:
        raise DomainError("harmonic requiere k >= 0")
    if k == 0:
        return 0.0
    total = 0.0
    for j in range(1, k + 1):
        total += 1.0 / j
    return total


def log_binomial(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    if n <= EXACT_BINOMIAL_LIMIT:
        return math.log(math.comb(n, k))
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def binomial(n: int, k: int) -> float:
    """Binomial exacto (entero) hasta n = 60, en espacio logarítmico por encima"""
    if k < 0 or k > n:
        return 0.0
    if n <= EXACT_BINOMIAL_LIMIT:
        return float(math.comb(n, k))
    return math.exp(log_binomial(n, k))


def _y_of(x: float) -> float:
    return x / (1.0 + x)


# ===== INTEGRALES I_{k,l} =====

def _check_I(k: int, l: int, x: float) -> None:
    if l not in (0, 1, 2):
        raise DomainError(f"I_{{k,l}} solo está soportada para l en {{0,1,2}} (l={l})")
    if k < l or (l == 1 and k < 1) or (l == 2 and k < 2):
        raise DomainError(f"I_{{k,l}} requiere k >= l (k={k}, l={l})")
    if x < 0:
        raise DomainError("I_{k,l} requiere x >= 0")


def integral_I_raw(k: int, l: int, x: float) -> float:
    """Formas cerradas (a), (b), (c) evaluadas tal cual (sumas alternadas)"""
    _check_I(k, l, x)
    if l == 2:
        return _y_of(x) ** (k - 1) / (k - 1)
    if l == 1:
        total = math.log1p(x)
        for j in range(1, k):
            total += (-1) ** j / j * math.comb(k - 1, j) * (1.0 - (1.0 + x) ** (-j))
        return total
    total = x - k * math.log1p(x)
    for j in range(1, k):
        total += (-1) ** (j - 1) / j * math.comb(k, j + 1) * (1.0 - (1.0 + x) ** (-j))
    return total


def _series_I0(k: int, y: float) -> float:
    # I_{k,0} = int_0^y u^k/(1-u)^2 du = sum_{m>=0} (m+1) y^{k+m+1}/(k+m+1)
    if y == 0.0:
        return 0.0
    log_y = math.log(y)
    total = 0.0
    start = 0
    while True:
        m = np.arange(start, start + _CHUNK, dtype=float)
        terms = (m + 1.0) * np.exp((k + m + 1.0) * log_y) / (k + m + 1.0)
        total += float(terms.sum())
        if terms[-1] <= TAIL_RELATIVE_CUTOFF * total:
            return total
        start += _CHUNK


def integral_I(k: int, l: int, x: float) -> float:
    """
    I_{k,l}(x) = int_0^x t^{k-l}/(1+t)^k dt, l en {0,1,2}.

    Para x chico las sumas alternadas de las formas cerradas se cancelan; allí
    se usan las series equivalentes en y = x/(1+x), que tienen términos positivos.
    """
    _check_I(k, l, x)
    y = _y_of(x)
    if l == 2 or y > SERIES_Y_LIMIT:
        return integral_I_raw(k, l, x)
    if l == 1:
        return ent_bracket_tail(k, x)
    return _series_I0(k, y)


# ===== INTEGRALES J_{k,l} =====

def integral_J(k: int, l: int, x: float) -> ExtendedReal:
    """
    J_{k,l}(x) = int_x^inf t^{k-l}/(1+t)^k dt; finita si y solo si l >= 2.
    """
    if k < l:
        raise DomainError(f"J_{{k,l}} requiere k >= l (k={k}, l={l})")
    if x < 0:
        raise DomainError("J_{k,l} requiere x >= 0")
    if l < 2:
        return ExtendedReal.inf()
    j = np.arange(0, k - l + 1, dtype=float)
    # (j+1)...(j+l-2) / ((k-1)...(k-l+1)) en espacio logarítmico
    log_coeff = (gammaln(j + l - 1) - gammaln(j + 1)) - (gammaln(k) - gammaln(k - l + 1))
    y = _y_of(x)
    powers = np.power(y, j)
    terms = powers * np.exp(log_coeff - (l - 1) * math.log1p(x))
    return ExtendedReal.of(float(terms.sum()))


def integral_J_at_zero(k: int, l: int) -> float:
    """J_{k,l}(0) = 1 / ((l-1) binomial(k-1, l-1))"""
    if l < 2 or k < l:
        raise DomainError("J_{k,l}(0) finita requiere k >= l >= 2")
    return 1.0 / ((l - 1) * binomial(k - 1, l - 1))


# ===== CORCHETE ln(1+tau) - sum_{i<k} y^i/i =====

def ent_bracket_naive(k: int, tau: float) -> float:
    """Forma directa; sufre cancelación catastrófica si y^k es chico"""
    if k < 1 or tau <= 0:
        raise DomainError("El corchete requiere k >= 1 y tau > 0")
    y = _y_of(tau)
    total = math.log1p(tau)
    for i in range(1, k):
        total -= y ** i / i
    return total


def _log_y(tau: float) -> float:
    """ln(tau/(1+tau)) = -ln(1 + 1/tau), sin redondear a 0 para tau grande"""
    return -math.log1p(1.0 / tau)


def _tail_terms_needed(log_y: float) -> float:
    # y^M < 1e-18  <=>  M > ln(1e18) / -ln y
    if not log_y < 0.0:
        return math.inf
    return -math.log(TAIL_RELATIVE_CUTOFF) / -log_y


def _tail_sum(k: int, log_y: float, shift: int) -> float:
    """sum_{i>=k} exp((i - shift) log y)/i"""
    total = 0.0
    start = k
    while True:
        i = np.arange(start, start + _CHUNK, dtype=float)
        terms = np.exp((i - shift) * log_y) / i
        total += float(terms.sum())
        if terms[-1] <= TAIL_RELATIVE_CUTOFF * total:
            return total
        start += _CHUNK


def _max_terms() -> int:
    from cppgen.config import get_settings

    return get_settings().tail_series_max_terms


def ent_bracket_tail(k: int, tau: float, max_terms: int = None) -> float:
    """
    Serie de cola sum_{i>=k} y^i/i, y = tau/(1+tau), cortada cuando un
    término cae por debajo de 1e-18 relativo. Si la serie necesitaría más de
    max_terms términos (y muy cerca de 1) se usa la forma directa, que en ese
    régimen no cancela.
    """
    if k < 1 or tau < 0:
        raise DomainError("El corchete requiere k >= 1 y tau >= 0")
    if tau == 0:
        return 0.0
    log_y = _log_y(tau)
    if _tail_terms_needed(log_y) > (max_terms or _max_terms()):
        return ent_bracket_naive(k, tau)
    return _tail_sum(k, log_y, 0)


def ent_bracket_scaled(k: int, tau: float, max_terms: int = None) -> float:
    """y^{-(k-1)} por el corchete, sin formar (1+tau)^{k-1} explícitamente"""
    if k < 1 or tau <= 0:
        raise DomainError("El corchete requiere k >= 1 y tau > 0")
    log_y = _log_y(tau)
    if _tail_terms_needed(log_y) > (max_terms or _max_terms()):
        return ent_bracket_naive(k, tau) * math.exp(-(k - 1) * log_y)
    return _tail_sum(k, log_y, k - 1)


# ===== CUADRATURA ADAPTATIVA =====

def quadrature(func, a: float, b: float, rel_tol: float = None, limit: int = 200) -> float:
    """
    scipy.integrate.quad con control de error: si el error estimado supera
    100 veces la tolerancia relativa pedida se lanza ConvergenceError.
    """
    from scipy.integrate import quad

    from cppgen.config import get_settings
    from cppgen.core.exceptions import ConvergenceError

    if rel_tol is None:
        rel_tol = get_settings().quad_rel_tol
    value, abserr = quad(func, a, b, epsabs=0.0, epsrel=rel_tol * 1e-2, limit=limit)
    achieved = abserr / abs(value) if value else abserr
    if not math.isfinite(value) or achieved > 100 * rel_tol:
        raise ConvergenceError("La cuadratura adaptativa no convergió", achieved)
    return value

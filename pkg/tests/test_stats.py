# tests/test_stats.py
import numpy as np
import pytest
from scipy import stats

from cppgen.core.exceptions import DomainError, InsufficientSampleError
from cppgen.core.random import RandomStream
from cppgen.services import statistical_tests


def test_ks_accepts_matching_law(rng):
    samples = rng.uniforms(2000)
    result = statistical_tests.ks_test(samples, lambda x: np.clip(x, 0, 1), name="uniform", level=0.01)
    assert result.name == "uniform"
    assert result.passed


def test_ks_rejects_wrong_law(rng):
    samples = rng.uniforms(2000) ** 2
    result = statistical_tests.ks_test(samples, lambda x: np.clip(x, 0, 1), level=0.01)
    assert not result.passed


def test_ks_p_values_are_uniform_under_the_null():
    root = RandomStream(4242)
    p_values = [
        statistical_tests.ks_test(root.split(trial).exponentials(2.0, 500), stats.expon(scale=0.5).cdf).p_value
        for trial in range(200)
    ]
    assert statistical_tests.ks_test(p_values, stats.uniform.cdf, level=0.01).passed


def test_ks_with_scalar_cdf(rng):
    samples = rng.exponentials(1.0, 500)
    result = statistical_tests.ks_test(samples, lambda x: float(stats.expon.cdf(x)))
    assert result.p_value > 1e-3


def test_two_sample_identical():
    values = np.linspace(0, 1, 100)
    result = statistical_tests.two_sample_ks(values, values)
    assert result.statistic == 0.0
    assert result.p_value == pytest.approx(1.0)


def test_insufficient_sample():
    with pytest.raises(InsufficientSampleError):
        statistical_tests.ks_test(np.ones(10), lambda x: x)


def test_chi_square_poisson(rng):
    counts = rng.poisson(5.0, 5000)
    assert statistical_tests.chi_square_poisson_test(counts, 5.0).p_value > 1e-3
    assert statistical_tests.chi_square_poisson_test(counts, 6.0).p_value < 1e-3


def test_chi_square_poisson_domain():
    with pytest.raises(DomainError):
        statistical_tests.chi_square_poisson_test(np.ones(100, dtype=int), 0.0)


def test_independence_table(rng):
    first = rng.uniforms(4000)
    independent = statistical_tests.quantile_table(first, rng.uniforms(4000))
    assert independent.sum() == 4000
    assert statistical_tests.chi_square_independence_test(independent).p_value > 1e-3
    coupled = statistical_tests.quantile_table(first, first + 0.1 * rng.uniforms(4000))
    assert statistical_tests.chi_square_independence_test(coupled).p_value < 1e-6


def test_bonferroni():
    assert statistical_tests.bonferroni(0.01, 4) == pytest.approx(0.0025)
    with pytest.raises(DomainError):
        statistical_tests.bonferroni(1.5, 2)


def test_z_score():
    assert statistical_tests.z_score([1.0, 1.0, 1.0], 1.0) == 0.0
    samples = RandomStream(5).uniforms(10_000)
    assert abs(statistical_tests.z_score(samples, 0.5)) <= 4

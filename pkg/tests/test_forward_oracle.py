# tests/test_forward_oracle.py
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cppgen.core.exceptions import AttemptsExhaustedError, DomainError
from cppgen.core.random import RandomStream
from cppgen.schemas import OracleTelemetry, PopulationCPP
from cppgen.services import cpp_sampler, forward_oracle, statistical_tests


# ===== POBLACIÓN E ÍNDICES =====

def test_population_depths_below_cut(rng):
    population = forward_oracle.simulate_population_cpp(4.0, 2.5, rng)
    assert population.pop_size == population.depths.size + 1
    assert np.all(population.depths <= 2.5)


def test_population_size_mean():
    N, t = 3.0, 2.0
    sizes = [forward_oracle.simulate_population_cpp(N, t, RandomStream(7).split(r)).pop_size for r in range(4000)]
    z = statistical_tests.z_score(sizes, 1.0 + N * t)
    assert abs(z) <= 4


def test_sample_indices_strictly_increasing(rng):
    indices = forward_oracle.draw_sample_indices(0.3, 200, rng).indices
    assert indices[0] >= 1
    assert np.all(np.diff(indices) >= 1)
    assert np.mean(np.diff(indices)) == pytest.approx(1 / 0.3, rel=0.2)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.2])
def test_sample_indices_domain(q, rng):
    with pytest.raises(DomainError):
        forward_oracle.draw_sample_indices(q, 5, rng)


def test_sample_depths_block_maxima():
    population = PopulationCPP(depths=[0.5, 1.5, 0.2, 0.9, 0.3, 0.1], pop_size=7)
    indices = np.array([2, 4, 7, 9])
    np.testing.assert_array_equal(forward_oracle.sample_depths(population, indices, 3), [1.5, 0.9])


# ===== PROBABILIDADES =====

def test_acceptance_probability_value():
    assert forward_oracle.acceptance_probability(5.0, 1.0, 2.0, 4) == pytest.approx(17.6 / 243, rel=1e-12)


def test_survival_and_event_probability():
    assert forward_oracle.survival_probability(5.0, 2.0) == pytest.approx(1 / 11)
    assert forward_oracle.event_probability(5.0, 1.0, 2.0, 4) == pytest.approx(17.6 / 243 / 11, rel=1e-12)


def test_event_frequency_matches_acceptance(rng):
    hits, attempts = forward_oracle.event_frequency(5.0, 1.0, 2.0, 4, rng, 20_000)
    rate = hits / attempts
    expected = forward_oracle.acceptance_probability(5.0, 1.0, 2.0, 4)
    se = math.sqrt(expected * (1 - expected) / attempts)
    assert abs(rate - expected) <= 4 * se
    # Los intentos ya sobreviven: la frecuencia no estima la probabilidad sin condicionar
    unconditioned = forward_oracle.event_probability(5.0, 1.0, 2.0, 4)
    assert unconditioned == pytest.approx(expected * forward_oracle.survival_probability(5.0, 2.0))
    assert rate - unconditioned > 20 * se


def test_telemetry_standard_error():
    telemetry = OracleTelemetry(attempts=400, accepted=100)
    assert telemetry.standard_error() == pytest.approx(math.sqrt(0.25 * 0.75 / 400))
    assert telemetry.standard_error(0.5) == pytest.approx(0.025)
    assert OracleTelemetry().standard_error() == math.inf


# ===== RECHAZO =====

def test_conditioned_genealogy_shape(rng):
    g = forward_oracle.sample_conditioned_genealogy(10.0, 1.0, 1.0, 3, rng)
    assert g.origin == 1.0
    assert g.depths.shape == (2,)


def test_batch_telemetry(rng):
    batch = forward_oracle.sample_conditioned_genealogies(10.0, 1.0, 1.0, 3, rng, size=20)
    assert batch.depths.shape == (20, 2)
    assert batch.telemetry.accepted == 20
    assert batch.telemetry.attempts >= 20
    assert batch.origin_label == "fixed:1.0"


def test_attempts_exhausted(rng):
    with pytest.raises(AttemptsExhaustedError) as info:
        forward_oracle.sample_conditioned_genealogies(1000.0, 0.01, 1.0, 50, rng, max_attempts=1)
    assert info.value.attempts == 1
    assert info.value.accepted == 0


@pytest.mark.parametrize(
    "N,p,t,n",
    [(1.0, 1.0, 1.0, 3), (5.0, 5.0, 1.0, 3), (5.0, 1.0, 0.0, 3), (5.0, 1.0, 1.0, 1)],
)
def test_oracle_domain(N, p, t, n, rng):
    with pytest.raises(DomainError):
        forward_oracle.sample_conditioned_genealogies(N, p, t, n, rng)


def test_oracle_matches_exact_depth_law(rng):
    p, t = 1.0, 1.0
    batch = forward_oracle.sample_conditioned_genealogies(10.0, p, t, 3, rng, size=400)
    level = statistical_tests.bonferroni(1e-3, 2)
    for column in range(2):
        result = statistical_tests.ks_test(
            batch.depths[:, column], lambda x: cpp_sampler.cdf_depth_fixed_t(x, p, t)
        )
        assert result.p_value > level


# ===== DIVERGENCIAS =====

def test_divergence_matrix_example():
    expected = np.array([[0.0, 2.0, 2.0], [2.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    np.testing.assert_array_equal(forward_oracle.divergence_matrix([2.0, 1.0]), expected)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1e6, allow_nan=False), min_size=1, max_size=12))
def test_divergence_matrix_is_ultrametric(depths):
    matrix = forward_oracle.divergence_matrix(depths)
    n = matrix.shape[0]
    np.testing.assert_array_equal(matrix, matrix.T)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                assert matrix[i, j] <= max(matrix[i, k], matrix[k, j])

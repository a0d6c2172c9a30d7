# tests/test_cpp_sampler.py
import math

import numpy as np
import pytest
from scipy.integrate import quad
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from cppgen.core.exceptions import DomainError
from cppgen.core.numeric import binomial
from cppgen.core.random import RandomStream
from cppgen.schemas import FixedTime, InfiniteTime, ModelParams, OrderStatMoment, PowerPrior
from cppgen.services import cpp_sampler, statistical_tests


# ===== CUANTILES =====

def test_quantile_fixed_t_examples():
    assert cpp_sampler.quantile_depth_fixed_t(1.0, 2.5, 3.0) == 3.0
    assert cpp_sampler.quantile_depth_fixed_t(0.0, 2.5, 3.0) == 0.0
    assert cpp_sampler.quantile_depth_fixed_t(0.5, 1.0, 1.0) == pytest.approx(1 / 3, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(p=st.floats(1e-3, 1e3), t=st.floats(1e-3, 1e6))
def test_quantile_fixed_t_reaches_origin_exactly(p, t):
    assert cpp_sampler.quantile_depth_fixed_t(1.0, p, t) == t


def test_prior_rows_reach_their_origin_exactly():
    params = ModelParams(n=4, p=1.3)
    u = np.array([[0.2, 1.0, 0.5, 1.0], [0.9, 1.0, 1.0, 0.0]])
    origins, depths = cpp_sampler._batch_rows(params, PowerPrior(i=1), u)
    assert depths[0, 0] == origins[0] and depths[0, 2] == origins[0]
    assert depths[1, 0] == origins[1] and depths[1, 1] == origins[1]
    assert depths[1, 2] == 0.0


def test_quantile_fixed_t_inverts_cdf():
    for u in (0.1, 0.37, 0.9):
        x = cpp_sampler.quantile_depth_fixed_t(u, 1.7, 2.2)
        assert cpp_sampler.cdf_depth_fixed_t(x, 1.7, 2.2) == pytest.approx(u, rel=1e-12)


def test_quantile_infinite_examples():
    assert cpp_sampler.quantile_depth_infinite(0.5, 1.0) == 1.0
    assert cpp_sampler.quantile_depth_infinite(0.0, 3.7) == 0.0
    assert cpp_sampler.quantile_depth_infinite(0.9, 2.0) == pytest.approx(4.5, rel=1e-14)


@pytest.mark.parametrize("u", [-0.1, 1.5, math.nan])
def test_quantile_fixed_t_domain(u):
    with pytest.raises(DomainError):
        cpp_sampler.quantile_depth_fixed_t(u, 1.0, 1.0)


def test_quantile_infinite_rejects_one():
    with pytest.raises(DomainError):
        cpp_sampler.quantile_depth_infinite(1.0, 1.0)


def test_depth_density_normalized():
    total, _ = quad(lambda x: cpp_sampler.density_depth_fixed_t(x, 1.3, 2.0), 0, 2.0)
    assert total == pytest.approx(1.0, rel=1e-10)


# ===== POSTERIOR DEL ORIGEN =====

def test_origin_from_uniform_single_individual():
    assert cpp_sampler.origin_from_uniform(1, 1.0, 0, 0.5) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("n,i", [(3, 0), (5, 2), (10, 1)])
def test_beta_transform_matches_numeric_inversion(n, i):
    p = 1.3
    mode = cpp_sampler.mode_posterior(n, p, i)
    for u in (0.05, 0.4, 0.8, 0.97):
        target = cpp_sampler.origin_from_uniform(n, p, i, u)

        def mass(t):
            points = [mode] if mode < t else None
            return quad(
                lambda s: cpp_sampler.posterior_density(n, p, i, s), 0, t,
                epsabs=0, epsrel=1e-12, limit=200, points=points,
            )[0] - u

        root = brentq(mass, 1e-12, 1e3, xtol=1e-14, rtol=1e-12)
        assert target == pytest.approx(root, rel=1e-8)


@pytest.mark.parametrize("n,i", [(5, 0), (5, 1), (5, 4)])
def test_posterior_density_normalized(n, i):
    total, _ = quad(lambda t: cpp_sampler.posterior_density(n, 1.0, i, t), 0, math.inf, epsabs=0, epsrel=1e-11, limit=200)
    assert total == pytest.approx(1.0, rel=1e-8)


def test_posterior_density_at_zero():
    assert cpp_sampler.posterior_density(2, 1.0, 0, 0.0) == 0.0
    assert cpp_sampler.posterior_density(2, 1.0, 1, 0.0) == pytest.approx(2.0, rel=1e-14)


def test_posterior_density_large_n_finite():
    value = cpp_sampler.posterior_density(5000, 1.0, 1, 2500.0)
    assert math.isfinite(value) and value > 0


def test_posterior_mode():
    assert cpp_sampler.mode_posterior(10, 1.0, 0) == pytest.approx(4.5)
    grid = np.linspace(0.01, 20, 20_000)
    peak = grid[np.argmax(cpp_sampler.posterior_density(10, 1.0, 0, grid))]
    assert peak == pytest.approx(4.5, abs=2e-3)


def test_posterior_cdf_matches_density():
    t = 3.0
    mass, _ = quad(lambda s: cpp_sampler.posterior_density(6, 2.0, 2, s), 0, t, epsabs=0, epsrel=1e-12)
    assert cpp_sampler.posterior_cdf(6, 2.0, 2, t) == pytest.approx(mass, rel=1e-10)


def test_posterior_requires_i_below_n(rng):
    with pytest.raises(DomainError):
        cpp_sampler.sample_origin_posterior(3, 1.0, 3, rng)


# ===== GENEALOGÍAS =====

def test_fixed_time_genealogy_bounds(rng):
    g = cpp_sampler.sample_genealogy(ModelParams(n=20, p=1.0), FixedTime(t=2.0), rng)
    assert g.origin == 2.0
    assert g.depths.size == 19
    assert np.all((g.depths >= 0) & (g.depths <= 2.0))


def test_uniform_consumption():
    params = ModelParams(n=6, p=1.0)
    for origin, used in ((FixedTime(t=1.0), 5), (InfiniteTime(), 5), (PowerPrior(i=2), 6)):
        stream = RandomStream(99)
        cpp_sampler.sample_genealogy(params, origin, stream)
        assert stream.uniform() == RandomStream(99).uniforms(used + 1)[used]


def test_batch_matches_sequential():
    params = ModelParams(n=5, p=0.7)
    for origin in (FixedTime(t=3.0), InfiniteTime(), PowerPrior(i=1)):
        origins, depths = cpp_sampler.sample_genealogies(params, origin, RandomStream(3), 4)
        stream = RandomStream(3)
        for row in range(4):
            g = cpp_sampler.sample_genealogy(params, origin, stream)
            assert origins[row] == pytest.approx(g.origin, rel=1e-14)
            np.testing.assert_allclose(depths[row], g.depths, rtol=1e-14)


def test_prior_genealogy_depths_below_origin(rng):
    origins, depths = cpp_sampler.sample_genealogies(ModelParams(n=8, p=1.0), PowerPrior(i=0), rng, 500)
    assert np.all(depths <= origins[:, None])


def test_two_individuals_fixed_time_law(rng):
    p, t = 1.0, 2.0
    _, depths = cpp_sampler.sample_genealogies(ModelParams(n=2, p=p), FixedTime(t=t), rng, 5000)
    result = statistical_tests.ks_test(depths[:, 0], lambda x: cpp_sampler.cdf_depth_fixed_t(x, p, t))
    assert result.p_value > 1e-3


def test_infinite_origin_median(rng):
    _, depths = cpp_sampler.sample_genealogies(ModelParams(n=2, p=1.0), InfiniteTime(), rng, 20_000)
    assert np.median(depths) == pytest.approx(1.0, abs=0.05)


def test_prior_marginal_matches_mixture(rng):
    n, p = 4, 1.0

    @np.vectorize
    def mixture_cdf(x):
        return quad(
            lambda t: cpp_sampler.cdf_depth_fixed_t(x, p, t) * cpp_sampler.posterior_density(n, p, 0, t),
            0, math.inf, limit=200,
        )[0]

    _, depths = cpp_sampler.sample_genealogies(ModelParams(n=n, p=p), PowerPrior(i=0), rng, 600)
    result = statistical_tests.ks_test(depths[:, 0], mixture_cdf)
    assert result.p_value > 1e-3


@pytest.mark.slow
def test_fixed_time_depths_independent(rng):
    _, depths = cpp_sampler.sample_genealogies(ModelParams(n=4, p=1.0), FixedTime(t=2.0), rng, 20_000)
    table = statistical_tests.quantile_table(depths[:, 0], depths[:, 2])
    assert statistical_tests.chi_square_independence_test(table).p_value > 1e-3


# ===== ESTADÍSTICOS DE ORDEN =====

def test_order_stats_decreasing():
    top = cpp_sampler.order_stats(np.array([[3.0, 1.0, 7.0, 2.0]]), 3)
    np.testing.assert_array_equal(top, [[7.0, 3.0, 2.0]])


def test_order_stat_density_support_and_normalization():
    assert cpp_sampler.order_stat_density_fixed_t(6, 3, 1.0, 2.0, 2.5) == 0.0
    total, _ = quad(lambda s: cpp_sampler.order_stat_density_fixed_t(6, 3, 1.0, 2.0, s), 0, 2.0, epsabs=0, epsrel=1e-12)
    assert total == pytest.approx(1.0, rel=1e-10)


def test_order_stat_density_two_individuals():
    for s in (0.1, 0.8, 1.9):
        assert cpp_sampler.order_stat_density_fixed_t(2, 1, 1.5, 2.0, s) == pytest.approx(
            cpp_sampler.density_depth_fixed_t(s, 1.5, 2.0), rel=1e-12
        )


def test_order_stat_density_domain():
    with pytest.raises(DomainError):
        cpp_sampler.order_stat_density_fixed_t(5, 5, 1.0, 1.0, 0.5)


def test_closed_form_moments():
    assert float(cpp_sampler.moment_order_stat(InfiniteTime(), 10, 2, 1, 1.0)) == pytest.approx(8.0)
    assert not cpp_sampler.moment_order_stat(InfiniteTime(), 10, 1, 1, 1.0).is_finite
    assert float(cpp_sampler.moment_order_stat(PowerPrior(i=0), 10, 1, 1, 1.0)) == pytest.approx(9.0)
    assert float(cpp_sampler.moment_order_stat(InfiniteTime(), 10, 4, 1, 1.0)) == pytest.approx(2.0)
    assert float(cpp_sampler.moment_order_stat(InfiniteTime(), 10, 2, 1, 2.0)) == pytest.approx(4.0)


def test_order_stat_moment_record():
    moment = cpp_sampler.order_stat_moment(InfiniteTime(), 10, 4, 1, 1.0)
    assert isinstance(moment, OrderStatMoment)
    assert (moment.k, moment.m) == (4, 1)
    assert isinstance(moment.regime, InfiniteTime)
    assert float(moment.value) == pytest.approx(2.0)
    assert not cpp_sampler.order_stat_moment(PowerPrior(i=0), 10, 1, 2, 1.0).value.is_finite


@pytest.mark.parametrize("n,k,m", [(10, 1, 1), (10, 4, 2), (10, 9, 3)])
def test_closed_forms_agree_after_index_shift(n, k, m):
    left = float(cpp_sampler.moment_order_stat(PowerPrior(i=0), n, k, m, 1.0)) * binomial(k, m)
    right = float(cpp_sampler.moment_order_stat(InfiniteTime(), n + 1, k + 1, m, 1.0)) * binomial(k, m)
    assert left == pytest.approx(right, rel=1e-12)
    assert left == pytest.approx(binomial(n - k + m - 1, m), rel=1e-12)


@pytest.mark.parametrize("k,m", [(1, 1), (3, 1), (3, 2)])
def test_prior_zero_quadrature_matches_closed_form(k, m):
    closed = float(cpp_sampler.moment_order_stat(PowerPrior(i=0), 6, k, m, 1.0))
    numeric = float(cpp_sampler.moment_order_stat_quadrature(0, 6, k, m, 1.0))
    assert numeric == pytest.approx(closed, rel=1e-6)


def test_power_prior_finiteness_boundary():
    assert cpp_sampler.moment_order_stat(PowerPrior(i=2), 6, 1, 3, 1.0).is_finite
    assert not cpp_sampler.moment_order_stat(PowerPrior(i=2), 6, 1, 4, 1.0).is_finite


def test_fixed_time_moment_matches_density():
    n, k, t = 6, 2, 1.5
    direct, _ = quad(lambda s: s * cpp_sampler.order_stat_density_fixed_t(n, k, 1.0, t, s), 0, t, epsabs=0, epsrel=1e-12)
    assert float(cpp_sampler.moment_order_stat(FixedTime(t=t), n, k, 1, 1.0)) == pytest.approx(direct, rel=1e-8)


def test_empirical_moment_within_standard_errors(rng):
    _, depths = cpp_sampler.sample_genealogies(ModelParams(n=10, p=1.0), InfiniteTime(), rng, 20_000)
    target = float(cpp_sampler.moment_order_stat(InfiniteTime(), 10, 4, 1, 1.0))
    z = statistical_tests.z_score(cpp_sampler.order_stats(depths, 4)[:, 3], target)
    assert abs(z) <= 4


# ===== RÉPLICAS =====

def test_replicates_use_their_own_stream_in_any_thread_count():
    expected = [RandomStream.for_replicate(5, index).uniform() for index in range(6)]
    assert cpp_sampler.map_replicates(lambda index, stream: stream.uniform(), 5, 6, threads=3) == expected
    assert cpp_sampler.map_replicates(lambda index, stream: stream.uniform(), 5, 6, threads=1) == expected

# cppgen/services/verification_service.py
"""
Suite de aceptación: equivalencia con el oráculo hacia adelante, identidades
deterministas de las fórmulas cerradas y chequeos estadísticos de los
teoremas límite. Cada criterio usa su propio flujo ``RandomStream(seed).split(índice)``.
"""
import math
import time
from typing import Callable, List, NamedTuple

import mpmath
import numpy as np
from scipy.integrate import quad

from cppgen.config import get_settings
from cppgen.core.numeric import ent_bracket_tail, integral_I, integral_J
from cppgen.core.random import RandomStream
from cppgen.schemas.genealogy_schema import Genealogy
from cppgen.schemas.params_schema import FixedTime, InfiniteTime, ModelParams, PowerPrior
from cppgen.schemas.report_schema import CriterionResult, VerificationReport

from .base_service import BaseService
from .cpp_service import cpp_sampler
from .limit_service import limit_objects
from .oracle_service import forward_oracle
from .sfs_service import mutation_sfs
from .stats_service import statistical_tests

Z_TOLERANCE = 4.0
MIN_REPLICATES = 200
FLATTENING_TAUS = (1e6, 1e10, 1e15)
FLATTENING_TOLERANCE = 0.02


class Criterion(NamedTuple):
    name: str
    deterministic: bool
    run: Callable[[RandomStream, float], CriterionResult]


def _relative_error(value: float, reference: float) -> float:
    scale = max(abs(reference), abs(value))
    return abs(value - reference) / scale if scale else 0.0


def _bracket_reference(k: int, tau: float) -> float:
    """ln(1+tau) - sum_{i<k} y^i/i con 50 cifras útiles tras la cancelación"""
    lost = math.ceil(k * math.log10((1.0 + tau) / tau))
    with mpmath.workdps(50 + lost):
        x = mpmath.mpf(tau)
        y = x / (1 + x)
        return float(mpmath.log1p(x) - mpmath.fsum(y ** i / i for i in range(1, k)))


class VerificationSuite(BaseService):
    """Criterios de aceptación; ``quick`` corre solo los deterministas"""

    def __init__(self):
        super().__init__(__name__)
        self.criteria: List[Criterion] = [
            Criterion("sampler_law", False, self.check_sampler_law),
            Criterion("acceptance_probability", False, self.check_acceptance_probability),
            Criterion("n_invariance", False, self.check_n_invariance),
            Criterion("expected_sfs_fixed_time", False, self.check_expected_sfs_fixed_time),
            Criterion("quadrature_consistency", True, self.check_quadrature_consistency),
            Criterion("branch_time_identity", True, self.check_branch_time_identity),
            Criterion("order_stat_moments", False, self.check_order_stat_moments),
            Criterion("appendix_integrals", True, self.check_appendix_integrals),
            Criterion("limit_theorems", False, self.check_limit_theorems),
            Criterion("largest_atom", False, self.check_largest_atom),
            Criterion("sfs_flattening", True, self.check_sfs_flattening),
            Criterion("limit_sfs", True, self.check_limit_sfs),
            Criterion("tail_series_stability", True, self.check_tail_series_stability),
        ]

    @staticmethod
    def _size(base: int, scale: float) -> int:
        return max(MIN_REPLICATES, int(round(base * scale)))

    @staticmethod
    def _level() -> float:
        return get_settings().significance

    def run(self, seed: int = 0, quick: bool = False, scale: float = 1.0) -> VerificationReport:
        root = RandomStream(seed)
        results = []
        for index, criterion in enumerate(self.criteria):
            if quick and not criterion.deterministic:
                continue
            started = time.perf_counter()
            result = criterion.run(root.split(index), scale)
            result = result.model_copy(update={"seconds": time.perf_counter() - started})
            self.logger.info(
                "criterion", criterion=result.criterion, passed=result.passed,
                statistic=result.statistic, p_value=result.p_value, seconds=round(result.seconds, 3),
            )
            results.append(result)
        return VerificationReport(seed=seed, quick=quick, results=results)

    # ===== ORÁCULO HACIA ADELANTE =====

    def check_sampler_law(self, rng: RandomStream, scale: float) -> CriterionResult:
        N, p, t, n = 5.0, 1.0, 2.0, 4
        size = self._size(20_000, scale)
        batch = forward_oracle.sample_conditioned_genealogies(N, p, t, n, rng.split(0), size=size)
        _, exact = cpp_sampler.sample_genealogies(ModelParams(n=n, p=p), FixedTime(t=t), rng.split(1), size)
        level = statistical_tests.bonferroni(self._level(), n - 1)
        tests = [
            statistical_tests.two_sample_ks(batch.depths[:, j], exact[:, j], level=level) for j in range(n - 1)
        ]
        return CriterionResult(
            criterion="sampler_law",
            statistic=max(test.statistic for test in tests),
            p_value=min(test.p_value for test in tests),
            tolerance=level,
            passed=all(test.passed for test in tests),
            detail=f"{size} genealogías aceptadas por motor, KS por coordenada",
        )

    def check_acceptance_probability(self, rng: RandomStream, scale: float) -> CriterionResult:
        N, p, t, n = 5.0, 1.0, 2.0, 4
        batch = forward_oracle.sample_conditioned_genealogies(N, p, t, n, rng, size=self._size(10_000, scale))
        expected = forward_oracle.acceptance_probability(N, p, t, n)
        telemetry = batch.telemetry
        se = telemetry.standard_error(expected)
        z = (telemetry.acceptance_rate - expected) / se
        return CriterionResult(
            criterion="acceptance_probability",
            statistic=z,
            tolerance=Z_TOLERANCE,
            passed=abs(z) <= Z_TOLERANCE,
            detail=f"tasa {telemetry.acceptance_rate:.6g} vs {expected:.6g} en {telemetry.attempts} intentos",
        )

    def check_n_invariance(self, rng: RandomStream, scale: float) -> CriterionResult:
        p, t, n = 1.0, 2.0, 4
        size = self._size(5_000, scale)
        samples = {}
        for index, N in enumerate((2.0, 5.0, 20.0)):
            batch = forward_oracle.sample_conditioned_genealogies(N, p, t, n, rng.split(index), size=size)
            samples[N] = batch.depths[:, 0]
        pairs = [(2.0, 5.0), (2.0, 20.0), (5.0, 20.0)]
        level = statistical_tests.bonferroni(self._level(), len(pairs))
        tests = [statistical_tests.two_sample_ks(samples[a], samples[b], level=level) for a, b in pairs]
        return CriterionResult(
            criterion="n_invariance",
            statistic=max(test.statistic for test in tests),
            p_value=min(test.p_value for test in tests),
            tolerance=level,
            passed=all(test.passed for test in tests),
            detail="H*_1 para N en {2, 5, 20}",
        )

    # ===== ESPECTRO =====

    def check_expected_sfs_fixed_time(self, rng: RandomStream, scale: float) -> CriterionResult:
        n, theta, p = 10, 1.0, 1.0
        replicates = self._size(100_000, scale)
        params = ModelParams(n=n, p=p, theta=theta)
        worst = 0.0
        for index, tau in enumerate((1.0, 10.0)):
            stream = rng.split(index)
            origins, depths = cpp_sampler.sample_genealogies(params, FixedTime(t=tau / p), stream, replicates)
            spectra = np.empty((replicates, n - 1))
            for row in range(replicates):
                g = Genealogy(origin=origins[row], depths=depths[row])
                spectra[row] = mutation_sfs.simulate_sfs(g, theta, stream).xi
            for k in range(1, n):
                expected = mutation_sfs.expected_sfs_fixed_time(n, k, theta, p, tau / p)
                worst = max(worst, abs(statistical_tests.z_score(spectra[:, k - 1], expected)))
        return CriterionResult(
            criterion="expected_sfs_fixed_time",
            statistic=worst,
            tolerance=Z_TOLERANCE,
            passed=worst <= Z_TOLERANCE,
            detail=f"max |z| sobre k y tau en {{1, 10}}, {replicates} réplicas",
        )

    def check_quadrature_consistency(self, rng: RandomStream, scale: float) -> CriterionResult:
        n, theta, p = 10, 1.0, 1.0
        worst = 0.0
        for k in range(1, n):
            value = mutation_sfs.expected_sfs_quadrature(0, n, k, theta, p)
            worst = max(worst, _relative_error(value, n * theta / (k * p)))
        for k in range(1, n - 2):
            value = mutation_sfs.expected_sfs_quadrature(1, n, k, theta, p)
            worst = max(worst, _relative_error(value, mutation_sfs.expected_sfs_prior1_closed(n, k, theta, p)))
        return CriterionResult(
            criterion="quadrature_consistency", statistic=worst, tolerance=1e-6, passed=worst <= 1e-6,
            detail="cuadratura contra g_0 y g_1 en forma cerrada, n = 10",
        )

    def check_branch_time_identity(self, rng: RandomStream, scale: float) -> CriterionResult:
        theta, p = 1.0, 1.0
        worst = 0.0
        for n in (5, 10, 20):
            for k in range(1, n):
                value = mutation_sfs.expected_sfs_via_branch_times(0, n, k, theta, p)
                worst = max(worst, _relative_error(value, n * theta / (k * p)))
        return CriterionResult(
            criterion="branch_time_identity", statistic=worst, tolerance=1e-10, passed=worst <= 1e-10,
            detail="n en {5, 10, 20}, todos los k",
        )

    def check_sfs_flattening(self, rng: RandomStream, scale: float) -> CriterionResult:
        n = 10
        limit = mutation_sfs.normalized_sfs_limit(n)
        # La distancia a 1/(n-1) decae como 1/ln(tau)
        deviations = []
        for tau in FLATTENING_TAUS:
            normalized = mutation_sfs.normalized_sfs(FixedTime(t=tau), n, 1.0, 1.0)
            deviations.append(float(np.max(np.abs(normalized - limit))))
        decreasing = all(a > b for a, b in zip(deviations, deviations[1:]))
        return CriterionResult(
            criterion="sfs_flattening",
            statistic=deviations[-1],
            tolerance=FLATTENING_TOLERANCE,
            passed=decreasing and deviations[-1] < FLATTENING_TOLERANCE,
            detail="max_k |E xi_k / E S - 1/9| = " + ", ".join(
                f"{d:.4g} (tau={tau:g})" for tau, d in zip(FLATTENING_TAUS, deviations)
            ),
        )

    def check_limit_sfs(self, rng: RandomStream, scale: float) -> CriterionResult:
        alpha, theta = 1.0, 1.0
        worst_exact = 0.0
        for n in (10, 100, 1000, 10_000):
            p = n / alpha
            for k in (1, 2, 3, n - 1):
                value = float(mutation_sfs.expected_sfs(PowerPrior(i=0), n, k, theta, p))
                worst_exact = max(worst_exact, _relative_error(value, mutation_sfs.limit_sfs(alpha, theta, k)))
        n = 10_000
        worst_prior1 = 0.0
        for k in (1, 2, 3):
            value = mutation_sfs.expected_sfs_prior1_closed(n, k, theta, n / alpha)
            worst_prior1 = max(worst_prior1, _relative_error(value, mutation_sfs.limit_sfs(alpha, theta, k)))
        return CriterionResult(
            criterion="limit_sfs",
            statistic=worst_prior1,
            tolerance=0.01,
            passed=worst_exact <= 1e-12 and worst_prior1 <= 0.01,
            detail=f"g_0 exacto (error {worst_exact:.3g}); g_1 a n = 10^4 dentro del 1%",
        )

    # ===== ESTADÍSTICOS DE ORDEN =====

    def check_order_stat_moments(self, rng: RandomStream, scale: float) -> CriterionResult:
        n, p = 10, 1.0
        size = self._size(100_000, scale)
        params = ModelParams(n=n, p=p)
        checks = []

        _, depths = cpp_sampler.sample_genealogies(params, InfiniteTime(), rng.split(0), size)
        moment = cpp_sampler.order_stat_moment(InfiniteTime(), n, 4, 1, p)
        checks.append(statistical_tests.z_score(cpp_sampler.order_stats(depths, moment.k)[:, moment.k - 1], float(moment.value)))

        _, depths = cpp_sampler.sample_genealogies(params, PowerPrior(i=0), rng.split(1), size)
        moment = cpp_sampler.order_stat_moment(PowerPrior(i=0), n, 1, 1, p)
        checks.append(statistical_tests.z_score(cpp_sampler.order_stats(depths, moment.k)[:, moment.k - 1], float(moment.value)))

        # T_{n,1} sin media finita bajo origen infinito
        large = self._size(1_000_000, scale)
        _, depths = cpp_sampler.sample_genealogies(params, InfiniteTime(), rng.split(2), large)
        heavy_mean = float(depths.max(axis=1).mean())
        k2_mean = float(cpp_sampler.moment_order_stat(InfiniteTime(), n, 2, 1, p))
        worst = max(abs(z) for z in checks)
        return CriterionResult(
            criterion="order_stat_moments",
            statistic=worst,
            tolerance=Z_TOLERANCE,
            passed=worst <= Z_TOLERANCE and heavy_mean > 10 * k2_mean,
            detail=f"media empírica de T_{{n,1}} = {heavy_mean:.4g} (10 x E T_{{n,2}} = {10 * k2_mean:.4g})",
        )

    # ===== INTEGRALES I Y J =====

    def check_appendix_integrals(self, rng: RandomStream, scale: float) -> CriterionResult:
        worst = 0.0
        for x in (0.1, 1.0, 10.0, 100.0):
            y = x / (1.0 + x)
            for k in range(1, 13):
                for l in (0, 1, 2):
                    if k < l or (l == 2 and k < 2):
                        continue
                    reference, _ = quad(lambda s: s ** (k - l) / (1.0 + s) ** k, 0.0, x, epsabs=0.0, epsrel=1e-13, limit=200)
                    worst = max(worst, _relative_error(integral_I(k, l, x), reference))
                for l in range(2, k + 1):
                    # t = u/(1-u): integrando u^{k-l} (1-u)^{l-2} en (y, 1)
                    reference, _ = quad(lambda u: u ** (k - l) * (1.0 - u) ** (l - 2), y, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
                    worst = max(worst, _relative_error(float(integral_J(k, l, x)), reference))
        return CriterionResult(
            criterion="appendix_integrals", statistic=worst, tolerance=1e-9, passed=worst <= 1e-9,
            detail="k <= 12, x en {0.1, 1, 10, 100}",
        )

    def check_tail_series_stability(self, rng: RandomStream, scale: float) -> CriterionResult:
        worst = 0.0
        for tau in (0.01, 1.0, 1e3):
            for k in range(1, 50):
                worst = max(worst, _relative_error(ent_bracket_tail(k, tau), _bracket_reference(k, tau)))
        return CriterionResult(
            criterion="tail_series_stability", statistic=worst, tolerance=1e-9, passed=worst <= 1e-9,
            detail="serie de cola contra 50 dígitos, k <= 49, tau en {0.01, 1, 1e3}",
        )

    # ===== OBJETOS LÍMITE =====

    def check_limit_theorems(self, rng: RandomStream, scale: float) -> CriterionResult:
        n, alpha = 2000, 1.0
        replicates = self._size(10_000, scale)
        reports = [
            limit_objects.empirical_limit_check(0, n, alpha, rng.split(0), replicates, top_k=1),
            limit_objects.empirical_limit_check(None, n, alpha, rng.split(1), replicates, top_k=2),
        ]
        tests = [test for report in reports for test in report.tests]

        # T_{n,1}, T_{n,2} contra muestras de (e_0, e_1)
        origins, depths = cpp_sampler.sample_genealogies(
            ModelParams.from_alpha(n, alpha), InfiniteTime(), rng.split(2), replicates
        )
        tops = cpp_sampler.order_stats(depths, 2)
        atoms = np.array([limit_objects.sample_top_atoms(alpha, 2, rng.split(3).split(r)) for r in range(replicates)])
        level = statistical_tests.bonferroni(self._level(), 2)
        for j in range(2):
            tests.append(statistical_tests.two_sample_ks(tops[:, j], atoms[:, j], name=f"T_{j + 1}_vs_e", level=level))
        return CriterionResult(
            criterion="limit_theorems",
            statistic=max(test.statistic for test in tests),
            p_value=min(test.p_value for test in tests),
            tolerance=self._level(),
            passed=all(test.passed for test in tests),
            detail=", ".join(f"{test.name}: p={test.p_value:.3g}" for test in tests),
        )

    def check_largest_atom(self, rng: RandomStream, scale: float) -> CriterionResult:
        alpha = 1.0
        # Truncamiento alto: solo importa el mayor átomo tras quitar los primeros
        x_min = 0.05
        replicates = self._size(100_000, scale)
        level = statistical_tests.bonferroni(self._level(), 2)
        tests = []
        for i in (0, 1):
            removed = np.empty(replicates)
            cox = np.empty(replicates)
            base = rng.split(i)
            for r in range(replicates):
                stream = base.split(r)
                measure = limit_objects.sample_pi_with_top_atoms(alpha, x_min, i + 2, stream)
                removed[r] = limit_objects.largest_atom(limit_objects.remove_largest_atoms(measure, i + 1))
                _, conditioned = limit_objects.sample_cox(i, alpha, x_min, stream)
                cox[r] = limit_objects.largest_atom(conditioned)
            tests.append(statistical_tests.two_sample_ks(removed, cox, name=f"largest_atom_i{i}", level=level))
        return CriterionResult(
            criterion="largest_atom",
            statistic=max(test.statistic for test in tests),
            p_value=min(test.p_value for test in tests),
            tolerance=level,
            passed=all(test.passed for test in tests),
            detail=f"{replicates} réplicas por i en {{0, 1}}",
        )


verification_suite = VerificationSuite()

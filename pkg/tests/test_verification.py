# tests/test_verification.py
import pytest

from cppgen.core.random import RandomStream
from cppgen.services import verification_service, verification_suite


def test_deterministic_criteria_pass():
    report = verification_suite.run(seed=1, quick=True)
    assert len(report.results) == sum(1 for c in verification_suite.criteria if c.deterministic)
    for result in report.results:
        assert result.passed, f"{result.criterion}: {result.detail}"


def test_tail_series_fault_is_detected(monkeypatch):
    real = verification_service.ent_bracket_tail

    def corrupted(k, tau, max_terms=None):
        return real(k, tau, max_terms) * (1.0 + 1e-6)

    monkeypatch.setattr(verification_service, "ent_bracket_tail", corrupted)
    result = verification_suite.check_tail_series_stability(RandomStream(0), 1.0)
    assert not result.passed
    assert result.statistic == pytest.approx(1e-6, rel=1e-2)


def test_report_serialization():
    report = verification_suite.run(seed=3, quick=True)
    data = report.to_report()
    assert data["seed"] == 3
    assert data["passed"] is True
    row = data["results"][0]
    assert set(row) >= {"criterion", "statistic", "p_value", "tolerance", "pass"}


def test_acceptance_probability_criterion():
    result = verification_suite.check_acceptance_probability(RandomStream(8), 0.05)
    assert result.passed, result.detail


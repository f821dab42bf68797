import numpy as np
import pytest

from certbound import (
    CertificationTester,
    ProbVec,
    TesterConfig,
    calibrate_threshold,
    empirical_sample_complexity,
    identity_test,
    l1_distance,
    sample_outcomes,
)
from certbound.certtest import (
    ADVERSARIES,
    max_inflation_adversary,
    pairwise_shift_adversary,
    tail_deletion_adversary,
)
from certbound.errors import InvalidParameterError


class TestTesterConfig:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            TesterConfig(eps=0.0, samples=10)
        with pytest.raises(InvalidParameterError):
            TesterConfig(eps=0.5, samples=0)
        with pytest.raises(InvalidParameterError):
            TesterConfig(eps=0.5, samples=10, calibration_runs=50)


class TestCalibration:
    def test_threshold_reproducible(self):
        p = ProbVec.uniform(16)
        cfg = TesterConfig(eps=0.5, samples=200, seed=42)
        assert calibrate_threshold(p, cfg) == calibrate_threshold(p, cfg)

    def test_point_mass_degenerate(self):
        p = ProbVec.point_mass(4, 1)
        cfg = TesterConfig(eps=0.5, samples=50, seed=0)
        tester = CertificationTester(p, cfg)
        samples = np.ones(50, dtype=int)
        verdict = tester.test(samples)
        assert verdict.accept

    def test_requires_normalized_target(self):
        with pytest.raises(InvalidParameterError):
            CertificationTester(ProbVec(np.array([0.3, 0.3])), TesterConfig(eps=0.5, samples=10))


class TestIdentityTest:
    def test_verdict_fields(self):
        p = ProbVec.uniform(8)
        cfg = TesterConfig(eps=0.5, samples=100, seed=1)
        samples = sample_outcomes(p, 100, 3)
        verdict = identity_test(p, samples, cfg)
        assert verdict.samples_used == 100
        assert verdict.accept == (verdict.statistic <= verdict.threshold)

    def test_sample_validation(self):
        p = ProbVec.uniform(4)
        cfg = TesterConfig(eps=0.5, samples=10, seed=0)
        tester = CertificationTester(p, cfg)
        with pytest.raises(InvalidParameterError):
            tester.statistic(np.array([0, 1, 2, 4, 0, 1, 2, 3, 0, 1]))
        with pytest.raises(InvalidParameterError):
            tester.statistic(np.array([0, 1, 2]))

    def test_deterministic_given_samples(self):
        p = ProbVec.uniform(8)
        cfg = TesterConfig(eps=0.5, samples=64, seed=5)
        samples = sample_outcomes(p, 64, 9)
        a = identity_test(p, samples, cfg)
        b = identity_test(p, samples, cfg)
        assert a.statistic == b.statistic and a.accept == b.accept

    def test_completeness_uniform_16(self):
        p = ProbVec.uniform(16)
        cfg = TesterConfig(eps=0.5, samples=200, seed=7)
        tester = CertificationTester(p, cfg)
        rate = tester.accept_rate(p, trials=500, stream=1)
        se = np.sqrt(rate * (1 - rate) / 500)
        assert rate >= 2 / 3 - 4 * se

    def test_soundness_against_point_mass(self):
        p = ProbVec.uniform(16)
        q = ProbVec.point_mass(16, 0)
        assert l1_distance(p, q) == pytest.approx(1.875)
        cfg = TesterConfig(eps=0.5, samples=200, seed=7)
        tester = CertificationTester(p, cfg)
        rate = tester.accept_rate(q, trials=500, stream=2)
        se = np.sqrt(max(rate * (1 - rate), 1 / 500) / 500)
        assert rate < 1 / 3 + 4 * se


class TestAdversaries:
    def test_pairwise_shift_distance(self):
        p = ProbVec.uniform(16)
        q = pairwise_shift_adversary(p, 0.5)
        assert l1_distance(p, q) == pytest.approx(0.5, abs=1e-12)
        assert q.normalized

    def test_tail_deletion_distance(self):
        p = ProbVec.uniform(16)
        q = tail_deletion_adversary(p, 0.5)
        assert l1_distance(p, q) >= 0.5 - 1e-9
        assert q.normalized

    def test_max_inflation_distance(self):
        rng = np.random.default_rng(3)
        x = rng.dirichlet(np.ones(16))
        p = ProbVec(x)
        q = max_inflation_adversary(p, 0.5)
        assert l1_distance(p, q) == pytest.approx(0.5, abs=1e-9)
        assert q.normalized

    def test_unreachable_distances_rejected(self):
        p = ProbVec.point_mass(4, 0)
        with pytest.raises(InvalidParameterError):
            pairwise_shift_adversary(ProbVec(np.array([0.0, 1.0])), 0.5)
        with pytest.raises(InvalidParameterError):
            tail_deletion_adversary(p, 2.5)
        with pytest.raises(InvalidParameterError):
            max_inflation_adversary(p, 0.5)

    def test_registry(self):
        assert set(ADVERSARIES) == {"pairwise_shift", "tail_deletion", "max_inflation"}


class TestEmpiricalSampleComplexity:
    def test_guard_against_close_adversary(self):
        p = ProbVec.uniform(8)
        cfg = TesterConfig(eps=0.5, samples=10, seed=0)
        with pytest.raises(InvalidParameterError):
            empirical_sample_complexity(p, p, cfg)
        with pytest.raises(InvalidParameterError):
            empirical_sample_complexity(p, p, cfg, trials=100)

    def test_finds_passing_size(self):
        p = ProbVec.uniform(8)
        q = pairwise_shift_adversary(p, 1.0)
        cfg = TesterConfig(eps=0.5, samples=10, seed=0, calibration_runs=200)
        s = empirical_sample_complexity(p, q, cfg, trials=300, s_start=8, refine_steps=2)
        assert s >= 8
        # the returned size passes both requirements
        from dataclasses import replace

        tester = CertificationTester(p, replace(cfg, samples=s))
        assert tester.accept_rate(p, 300, stream=1) >= 2 / 3
        assert tester.accept_rate(q, 300, stream=2) < 1 / 3

    def test_bounded_support_independent_of_ambient_dimension(self):
        # support-2 target: measured complexity does not grow with ambient d
        cfg = TesterConfig(eps=0.5, samples=10, seed=2, calibration_runs=200)
        results = []
        for d in (4, 64):
            x = np.zeros(d)
            x[0] = x[1] = 0.5
            p = ProbVec(x)
            q_arr = x.copy()
            q_arr[0], q_arr[1] = 0.875, 0.125
            q = ProbVec(q_arr)
            results.append(empirical_sample_complexity(p, q, cfg, trials=300, s_start=4, refine_steps=2))
        assert results[1] <= 4 * results[0]

"""Samplers and randomized suites."""

import numpy as np
import pytest

from toppmap.model import RegimeKind, classify_regime
from toppmap.stability import fixed_points
from toppmap.verify import (
    eigen_agreement_suite,
    omega2_invariance_suite,
    run_suites,
    sample_admissible,
    sample_critical_two,
    sample_states,
    sample_subcritical,
)


class TestSamplers:
    def test_subcritical_sampler(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = sample_subcritical(rng)
            r = classify_regime(p)
            assert r.kind is RegimeKind.SUBCRITICAL, p

    def test_critical_sampler_exact_tangency(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = sample_critical_two(rng)
            assert p.r1 * p.r1 == 4.0 * p.r2 * p.d0  # bitwise, by construction
            r = classify_regime(p)
            assert r.kind is RegimeKind.CRITICAL
            assert r.critical_extras.two_fixed_points, p
            assert len(fixed_points(p, regime=r)) == 2

    def test_states_land_in_region(self):
        rng = np.random.default_rng(2)
        p = sample_critical_two(rng)
        from toppmap.model import domain_bounds, omega1_mask, omega_mask
        b = domain_bounds(p)
        assert omega_mask(p, sample_states(rng, p, 500, "omega"), b).all()
        assert omega1_mask(p, sample_states(rng, p, 500, "omega1"), b).all()
        with pytest.raises(ValueError):
            sample_states(rng, p, 5, "nowhere")


class TestSuites:
    def test_all_pass_on_benchmark_sets(self, fig1_params, fig2_params):
        for p in (fig1_params, fig2_params):
            results = run_suites(p, seed=42, samples=2000, param_samples=50,
                                 period_samples=100)
            assert all(r.passed for r in results), [
                (r.name, r.failures[:1]) for r in results if not r.passed]

    def test_omega2_suite_skips_without_zstar(self, fig1_params):
        rng = np.random.default_rng(3)
        r = omega2_invariance_suite(fig1_params, rng, 100)
        assert r.passed and r.checked == 0 and r.note is not None

    def test_deterministic_given_seed(self, fig2_params):
        a = run_suites(fig2_params, seed=7, samples=500, param_samples=20,
                       period_samples=50)
        b = run_suites(fig2_params, seed=7, samples=500, param_samples=20,
                       period_samples=50)
        assert a == b

    def test_eigen_agreement(self):
        rng = np.random.default_rng(4)
        r = eigen_agreement_suite(rng, 30)
        assert r.passed
        assert r.checked == 60  # both fixed points per parameter set

    def test_refuses_inadmissible(self, fig1_params):
        from toppmap.model import ModelParams, params_to_dict
        p = ModelParams(**{**params_to_dict(fig1_params), "d0": 0.1})
        with pytest.raises(ValueError):
            run_suites(p, seed=1)

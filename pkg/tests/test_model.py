"""Parameter/state types, the one-step map, bounds, regimes, membership."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import raw_step
from toppmap.model import (
    COND_D0,
    COND_GA,
    COND_TANGENT,
    EXTRA_LEFT,
    DomainFault,
    ModelParams,
    PreconditionFault,
    RegimeKind,
    State,
    classify_regime,
    domain_bounds,
    in_omega,
    in_omega1,
    in_omega2,
    params_from_dict,
    params_to_dict,
    step,
    step_many,
    u1_point,
    u2_point,
)


class TestModelParams:
    def test_all_fields_positive_required(self):
        with pytest.raises(ValueError):
            ModelParams(g0=0.1, g1=-0.15, c=0.6, s1=1, s2=0.2, k=0.1,
                        d0=0.4, r1=1, r2=1)
        with pytest.raises(ValueError):
            ModelParams(g0=0.0, g1=0.15, c=0.6, s1=1, s2=0.2, k=0.1,
                        d0=0.4, r1=1, r2=1)
        with pytest.raises(ValueError):
            ModelParams(g0=math.inf, g1=0.15, c=0.6, s1=1, s2=0.2, k=0.1,
                        d0=0.4, r1=1, r2=1)

    def test_dict_round_trip(self, fig1_params):
        d = params_to_dict(fig1_params)
        assert params_from_dict(d) == fig1_params

    def test_unknown_keys_rejected(self, fig1_params):
        d = params_to_dict(fig1_params)
        d["gamma"] = 1.0
        with pytest.raises(ValueError, match="unknown"):
            params_from_dict(d)

    def test_missing_keys_rejected(self, fig1_params):
        d = params_to_dict(fig1_params)
        del d["s2"]
        with pytest.raises(ValueError, match="missing"):
            params_from_dict(d)


class TestStep:
    def test_u1_is_fixed(self, fig1_params):
        u = State(2.0 / 3.0, 0.0, 0.0)
        assert step(fig1_params, u) == pytest.approx(u, abs=1e-15)

    def test_hand_substitution(self, fig1_params):
        got = step(fig1_params, State(0.5, 0.3, 0.016))
        want = raw_step(fig1_params, 0.5, 0.3, 0.016)
        assert got == pytest.approx(want, abs=1e-15)
        # the coarse decimals from the hand computation
        assert got == pytest.approx((0.435, 0.27888888888888889, 0.0136), abs=1e-15)

    def test_axis_orbit_is_affine(self, fig1_params):
        # y = z = 0 kills the coupling terms
        s = step(fig1_params, State(0.37, 0.0, 0.0))
        assert s.y == 0.0 and s.z == 0.0
        assert s.x == pytest.approx(
            fig1_params.g0 + (1 - fig1_params.g1) * 0.37, abs=1e-15)

    def test_negative_input_rejected(self, fig1_params):
        with pytest.raises(PreconditionFault):
            step(fig1_params, State(-0.1, 0.0, 0.0))

    def test_negative_output_is_domain_fault(self, fig1_params):
        # far outside Omega: huge y drives x' below zero
        with pytest.raises(DomainFault):
            step(fig1_params, State(1.0, 50.0, 0.0))

    @given(st.floats(0.0, 1.5), st.floats(0.0, 1.4), st.floats(0.0, 0.14))
    def test_vectorized_matches_scalar_bitwise(self, x, y, z):
        p = ModelParams(g0=0.1, g1=0.15, c=0.6, s1=1, s2=0.2, k=0.1,
                        d0=0.4, r1=1, r2=1)
        try:
            s = step(p, State(x, y, z))
        except DomainFault:
            return
        v = step_many(p, np.array([[x, y, z]]))[0]
        assert (v == np.array(s)).all()


class TestDomainBounds:
    def test_fig1(self, fig1_params):
        b = domain_bounds(fig1_params)
        # oracle: direct substitution into the three formulas
        assert b.A == pytest.approx((1 + math.sqrt(1 + 4 * 0.6)) / 2, abs=1e-15)
        assert b.A == pytest.approx(1.4219544457292887, abs=1e-12)
        assert b.B == pytest.approx(0.85 / 0.6, abs=1e-15)
        assert b.C == pytest.approx(0.085 / 0.6, abs=1e-15)

    def test_fig2_A_is_exact(self, fig2_params):
        # sqrt(1 + 4*0.75) = 2, so A = 3/2 exactly
        assert domain_bounds(fig2_params).A == 1.5

    def test_radical_collapse(self):
        p = ModelParams(g0=0.1, g1=0.5, c=1, s1=1, s2=0.2, k=1, d0=1, r1=1, r2=1)
        b = domain_bounds(p)
        assert (b.A, b.B, b.C) == (1.0, 0.5, 0.5)

    def test_negative_radicand_faults(self):
        p = ModelParams(g0=0.1, g1=0.5, c=1, s1=1, s2=0.2, k=1, d0=3.0,
                        r1=1, r2=1)
        with pytest.raises(DomainFault):
            domain_bounds(p)


class TestClassifyRegime:
    def test_fig1_subcritical(self, fig1_params):
        r = classify_regime(fig1_params)
        assert r.kind is RegimeKind.SUBCRITICAL
        assert r.violations == ()
        assert r.critical_extras is None

    def test_fig2_critical_two_fixed_points(self, fig2_params):
        r = classify_regime(fig2_params)
        assert r.kind is RegimeKind.CRITICAL
        assert r.critical_extras is not None
        assert r.critical_extras.two_fixed_points
        assert r.critical_extras.failed == ()

    def test_low_d0_inadmissible(self, fig1_params):
        p = ModelParams(**{**params_to_dict(fig1_params), "d0": 0.1})
        r = classify_regime(p)
        assert r.kind is RegimeKind.INADMISSIBLE
        assert r.violations == (COND_TANGENT,)

    def test_violations_ordered_and_cumulative(self):
        p = ModelParams(g0=10.0, g1=0.5, c=1, s1=1, s2=0.2, k=1, d0=3.0,
                        r1=4, r2=1)
        r = classify_regime(p)
        assert r.violations == (COND_D0, COND_GA, COND_TANGENT)

    def test_critical_without_extras(self, fig2_params):
        p = ModelParams(**{**params_to_dict(fig2_params), "g0": 0.06})
        r = classify_regime(p)
        assert r.kind is RegimeKind.CRITICAL
        assert not r.critical_extras.two_fixed_points
        assert EXTRA_LEFT in r.critical_extras.failed

    def test_tangency_tolerance_override(self, fig2_params):
        d = params_to_dict(fig2_params)
        p = ModelParams(**{**d, "d0": 0.25 * (1 + 1e-10)})
        assert classify_regime(p).kind is RegimeKind.CRITICAL
        assert classify_regime(p, critical_rtol=1e-12).kind is RegimeKind.SUBCRITICAL


class TestOmegaMembership:
    def test_interior_point(self, fig1_params):
        assert in_omega(fig1_params, State(0.5, 0.3, 0.016))

    def test_x_below_g0(self, fig1_params):
        assert not in_omega(fig1_params, State(0.05, 0.0, 0.0))

    def test_boundary_included(self, fig1_params):
        assert in_omega(fig1_params, State(fig1_params.g0, 0.0, 0.0))
        b = domain_bounds(fig1_params)
        assert in_omega(fig1_params, State(b.A, b.B, b.C), b)

    def test_omega1_omega2_split(self, fig2_params):
        s = State(0.5, 0.18, 0.016)
        assert in_omega1(fig2_params, s)
        assert not in_omega2(fig2_params, s)  # z = 0.016 > z* = 0.015
        assert in_omega2(fig2_params, State(0.5, 0.18, 0.014))
        assert not in_omega1(fig2_params, State(0.7, 0.0, 0.0))  # x > 2/3

    def test_omega2_requires_zstar(self, fig1_params):
        with pytest.raises(PreconditionFault):
            in_omega2(fig1_params, State(0.5, 0.18, 0.014))


class TestFixedPointLocations:
    def test_u1_location(self, fig1_params):
        assert u1_point(fig1_params) == pytest.approx((2 / 3, 0.0, 0.0), abs=1e-15)

    def test_u2_location_fig2(self, fig2_params):
        assert u2_point(fig2_params) == pytest.approx((0.5, 1 / 12, 3 / 200),
                                                      abs=1e-15)


class TestClosureProperties:
    """Randomized one-step closure of Omega and Omega_1 plus the proof-level
    inequality chains (small counts here; the full budget runs in the
    acceptance suite)."""

    def test_omega_closure_and_chains(self, fig1_params, fig2_params):
        rng = np.random.default_rng(1234)
        for p in (fig1_params, fig2_params):
            b = domain_bounds(p)
            states = rng.uniform([p.g0, 0, 0], [b.A, b.B, b.C], (2000, 3))
            nxt = step_many(p, states)
            assert in_omega_mask(p, nxt, b).all()
            assert (nxt[:, 0] >= p.g0).all()  # x' >= g0
            assert (nxt[:, 1] <= b.B).all()   # y' <= B

    def test_omega1_closure(self, fig2_params):
        p = fig2_params
        b = domain_bounds(p)
        rng = np.random.default_rng(99)
        gx = p.g0 / p.g1
        states = rng.uniform([p.g0, 0, 0], [gx, b.B, b.C], (2000, 3))
        nxt = step_many(p, states)
        assert (nxt[:, 0] <= gx).all()
        assert in_omega_mask(p, nxt, b).all()

    def test_omega2_closure(self, fig2_params):
        p = fig2_params
        b = domain_bounds(p)
        zstar = u2_point(p).z
        rng = np.random.default_rng(7)
        states = rng.uniform([p.g0, 0, 0], [p.g0 / p.g1, b.B, zstar], (2000, 3))
        nxt = step_many(p, states)
        assert (nxt[:, 2] < zstar).all()


def in_omega_mask(p, states, b):
    x, y, z = states[:, 0], states[:, 1], states[:, 2]
    return ((p.g0 <= x) & (x <= b.A) & (0 <= y) & (y <= b.B)
            & (0 <= z) & (z <= b.C))

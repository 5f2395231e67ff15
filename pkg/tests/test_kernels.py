"""Backend selection and compiled/pure bit parity."""

import math

import numpy as np
import pytest

from toppmap import kernels
from toppmap.kernels import available_backends
from toppmap.model import State, step, step_many
from toppmap.repro import FIG1_PARAMS, FIG2_PARAMS
from toppmap.verify import sample_admissible

BACKENDS = available_backends()
needs_compiled = pytest.mark.skipif(
    "compiled" not in BACKENDS, reason="compiled extension not built")


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "pure")
    assert "pure" in BACKENDS


def test_iterate_matches_scalar_step(fig2_params):
    out = np.empty((4, 3))
    neg = kernels.iterate_into(*fig2_params.as_args(), 0.5, 0.18, 0.016, out)
    assert neg == -1
    s = State(0.5, 0.18, 0.016)
    for i in range(3):
        s = step(fig2_params, s)
        assert tuple(out[i + 1]) == tuple(s)


def test_iterate_matches_vectorized_step(fig1_params):
    out = np.empty((101, 3))
    kernels.iterate_into(*fig1_params.as_args(), 0.5, 0.3, 0.016, out)
    assert (step_many(fig1_params, out[:-1]) == out[1:]).all()


def test_step_n_equals_iterate_tail(fig2_params):
    out = np.empty((51, 3))
    kernels.iterate_into(*fig2_params.as_args(), 0.5, 0.18, 0.016, out)
    x, y, z, neg = kernels.step_n(*fig2_params.as_args(), 0.5, 0.18, 0.016, 50)
    assert neg == -1
    assert (x, y, z) == tuple(out[50])


def test_negative_detection_index(fig1_params):
    # y large enough to push x' negative on the first step
    out = np.empty((5, 3))
    neg = kernels.iterate_into(*fig1_params.as_args(), 1.0, 50.0, 0.0, out)
    assert neg == 1
    out0 = np.empty((5, 3))
    assert kernels.iterate_into(*fig1_params.as_args(), -0.5, 0.0, 0.0, out0) == 0


@needs_compiled
class TestBackendParity:
    """The two backends must agree bit for bit."""

    def _random_cases(self):
        rng = np.random.default_rng(2024)
        cases = []
        for _ in range(20):
            params = sample_admissible(rng)
            s0 = rng.uniform([0.0, 0.0, 0.0], [2.0, 2.0, 0.2], 3)
            cases.append((params, s0))
        # the two benchmark sets with in-region starts
        for p in (FIG1_PARAMS, FIG2_PARAMS):
            cases.append((p, np.array([0.5, 0.18, 0.016])))
        return cases

    def test_iterate_into(self):
        comp, pure = BACKENDS["compiled"], BACKENDS["pure"]
        for params, s0 in self._random_cases():
            a = np.empty((301, 3))
            b = np.empty((301, 3))
            na = comp.iterate_into(*params.as_args(), *s0, a)
            nb = pure.iterate_into(*params.as_args(), *s0, b)
            assert na == nb
            lim = 301 if na < 0 else na + 1
            assert (a[:lim] == b[:lim]).all()

    def test_step_n(self):
        comp, pure = BACKENDS["compiled"], BACKENDS["pure"]
        for params, s0 in self._random_cases():
            ra = comp.step_n(*params.as_args(), *s0, 200)
            rb = pure.step_n(*params.as_args(), *s0, 200)
            assert tuple(ra) == tuple(rb)

    def test_converge(self):
        comp, pure = BACKENDS["compiled"], BACKENDS["pure"]
        targets = np.array([[2 / 3, 0.0, 0.0], [0.5, 1 / 12, 3 / 200]])
        for params, s0 in self._random_cases():
            ra = comp.converge(*params.as_args(), *s0, targets, 2 / 3,
                               math.nan, 1e-8, 5000)
            rb = pure.converge(*params.as_args(), *s0, targets, 2 / 3,
                               math.nan, 1e-8, 5000)
            assert tuple(ra) == tuple(rb)

    def test_period_scan(self):
        comp, pure = BACKENDS["compiled"], BACKENDS["pure"]
        for params, s0 in self._random_cases():
            pa = comp.period_scan(*params.as_args(), *s0, 64, 1e-10)
            pb = pure.period_scan(*params.as_args(), *s0, 64, 1e-10)
            assert pa == pb

    def test_long_orbit_bitwise(self):
        comp, pure = BACKENDS["compiled"], BACKENDS["pure"]
        args = FIG2_PARAMS.as_args()
        a = np.empty((20001, 3))
        b = np.empty((20001, 3))
        assert comp.iterate_into(*args, 0.5, 0.18, 0.016, a) == -1
        assert pure.iterate_into(*args, 0.5, 0.18, 0.016, b) == -1
        assert (a == b).all()

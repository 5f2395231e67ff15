"""Seeded randomized verification suites.

Each suite draws from an explicit numpy Generator, so a fixed seed makes
the whole run reproducible.  Parameter samplers produce admissible sets by
construction; the critical sampler picks the tangency values on a dyadic
grid so that r1^2 = 4*r2*d0 holds exactly in binary, not just within the
classifier tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import check_monotone_z, detect_period, iterate
from .model import (
    ModelParams,
    RegimeKind,
    classify_regime,
    domain_bounds,
    omega1_mask,
    omega2_mask,
    omega_mask,
    step_many,
    u2_point,
)
from .stability import (
    char_quadratic_u2,
    eigenvalues_numeric,
    fixed_points,
    jacobian,
)

__all__ = [
    "SuiteResult",
    "sample_subcritical",
    "sample_critical_two",
    "sample_admissible",
    "sample_states",
    "omega_invariance_suite",
    "omega1_invariance_suite",
    "omega2_invariance_suite",
    "monotone_z_suite",
    "period_absence_suite",
    "sign_condition_suite",
    "eigen_agreement_suite",
    "run_suites",
]

MAX_RECORDED_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    note: str | None = None


# ---------------------------------------------------------------------------
# Samplers


def sample_subcritical(rng: np.random.Generator) -> ModelParams:
    """Random parameters satisfying the admissibility conditions with
    r1^2 strictly below 4*r2*d0."""
    g1 = rng.uniform(0.05, 0.95)
    k = rng.uniform(0.05, 1.0)
    d0 = rng.uniform(0.05, 1.0)
    r2 = 10.0 ** rng.uniform(-1.0, 1.0)
    r1 = rng.uniform(0.1, 0.95) * (2.0 * math.sqrt(r2 * d0))
    A = (r1 + math.sqrt(r1 * r1 + 4.0 * r2 * (1.0 - d0))) / (2.0 * r2)
    # Stay 0.1% below the g0/g1 <= A boundary so float rounding cannot flip it.
    g0 = rng.uniform(0.2, 0.999) * (g1 * A)
    return ModelParams(g0=g0, g1=g1, c=10.0 ** rng.uniform(-1.0, 1.0),
                       s1=10.0 ** rng.uniform(-1.0, 1.0),
                       s2=10.0 ** rng.uniform(-1.5, 0.5),
                       k=k, d0=d0, r1=r1, r2=r2)


def sample_critical_two(rng: np.random.Generator) -> ModelParams:
    """Random parameters at the exact tangency r1^2 = 4*r2*d0 satisfying the
    two-fixed-point inequalities.

    x* and r2 live on a coarse dyadic grid, so d0 = r2*x*^2 and r1 = 2*r2*x*
    are exact and the tangency holds bitwise.
    """
    while True:
        xs = rng.integers(8, 97) / 64.0    # x* in [0.125, 1.5]
        r2 = rng.integers(8, 65) / 32.0    # r2 in [0.25, 2]
        d0 = r2 * xs * xs
        if 0.05 <= d0 <= 1.0:
            break
    r1 = 2.0 * r2 * xs
    g1 = rng.uniform(0.05, 0.95)
    A = (r1 + math.sqrt(r1 * r1 + 4.0 * r2 * (1.0 - d0))) / (2.0 * r2)
    lo = g1 * xs
    hi = min(xs, g1 * A)
    g0 = lo + rng.uniform(0.05, 0.95) * (hi - lo)
    s2_max = d0 * (r1 - 2.0 * r2 * g0) / (r2 * (2.0 * r2 * g0 - g1 * r1))
    s2 = rng.uniform(0.05, 0.95) * s2_max
    return ModelParams(g0=g0, g1=g1, c=10.0 ** rng.uniform(-1.0, 1.0),
                       s1=10.0 ** rng.uniform(-1.0, 1.0), s2=s2,
                       k=rng.uniform(0.05, 1.0), d0=d0, r1=r1, r2=r2)


def sample_admissible(rng: np.random.Generator) -> ModelParams:
    """Either regime, 50/50."""
    if rng.random() < 0.5:
        return sample_subcritical(rng)
    return sample_critical_two(rng)


def sample_states(rng: np.random.Generator, params: ModelParams, n: int,
                  region: str = "omega") -> np.ndarray:
    """Uniform samples from Omega, Omega_1 or Omega_2 (all are boxes)."""
    b = domain_bounds(params)
    if region == "omega":
        low, high = [params.g0, 0.0, 0.0], [b.A, b.B, b.C]
    elif region == "omega1":
        low, high = [params.g0, 0.0, 0.0], [params.g0 / params.g1, b.B, b.C]
    elif region == "omega2":
        zstar = u2_point(params).z  # caller guarantees it exists
        low, high = [params.g0, 0.0, 0.0], [params.g0 / params.g1, b.B, zstar]
    else:
        raise ValueError(f"unknown region {region!r}")
    return rng.uniform(low, high, size=(n, 3))


# ---------------------------------------------------------------------------
# Suites


def _closure_suite(name: str, params: ModelParams, rng: np.random.Generator,
                   samples: int, region: str, mask_fn) -> SuiteResult:
    bounds = domain_bounds(params)
    states = sample_states(rng, params, samples, region)
    nxt = step_many(params, states)
    ok = mask_fn(nxt, bounds)
    bad = np.flatnonzero(~ok)
    failures = [
        {"state": [float(v) for v in states[i]],
         "next": [float(v) for v in nxt[i]]}
        for i in bad[:MAX_RECORDED_FAILURES]
    ]
    return SuiteResult(name, passed=bad.size == 0, checked=samples,
                       failures=failures)


def omega_invariance_suite(params: ModelParams, rng: np.random.Generator,
                           samples: int) -> SuiteResult:
    return _closure_suite(
        "omega-invariance", params, rng, samples, "omega",
        lambda nxt, b: omega_mask(params, nxt, b))


def omega1_invariance_suite(params: ModelParams, rng: np.random.Generator,
                            samples: int) -> SuiteResult:
    return _closure_suite(
        "omega1-invariance", params, rng, samples, "omega1",
        lambda nxt, b: omega1_mask(params, nxt, b))


def omega2_invariance_suite(params: ModelParams, rng: np.random.Generator,
                            samples: int) -> SuiteResult:
    regime = classify_regime(params)
    extras = regime.critical_extras
    if extras is None or not extras.two_fixed_points:
        return SuiteResult("omega2-invariance", passed=True, checked=0,
                           note="skipped: z* does not exist in this regime")
    zstar = u2_point(params).z
    return _closure_suite(
        "omega2-invariance", params, rng, samples, "omega2",
        lambda nxt, b: omega2_mask(params, nxt, zstar, b))


def monotone_z_suite(params: ModelParams, rng: np.random.Generator,
                     orbits: int, steps: int = 200) -> SuiteResult:
    failures = []
    for _ in range(orbits):
        s0 = sample_states(rng, params, 1, "omega")[0]
        traj = iterate(params, s0, steps)
        ok, idx = check_monotone_z(traj)
        if not ok and len(failures) < MAX_RECORDED_FAILURES:
            failures.append({"state": [float(v) for v in s0], "step": idx})
    return SuiteResult("z-monotonicity", passed=not failures, checked=orbits,
                       failures=failures)


def period_absence_suite(params: ModelParams, rng: np.random.Generator,
                         samples: int, pmax: int = 64,
                         tol: float = 1e-10) -> SuiteResult:
    """No p-periodic point with p in [2, pmax] should be detectable from
    random in-region states (p = 1 would be a fixed point and is not a
    failure)."""
    failures = []
    states = sample_states(rng, params, samples, "omega")
    for s0 in states:
        p = detect_period(params, s0, pmax=pmax, tol=tol, burn_in=0)
        if p is not None and p >= 2 and len(failures) < MAX_RECORDED_FAILURES:
            failures.append({"state": [float(v) for v in s0], "period": p})
    return SuiteResult("period-absence", passed=not failures, checked=samples,
                       failures=failures)


def sign_condition_suite(rng: np.random.Generator, param_sets: int) -> SuiteResult:
    """F(1) > 0, F(-1) > 0 and C* < 1 must hold for every parameter set in
    the critical two-fixed-point regime."""
    failures = []
    for _ in range(param_sets):
        params = sample_critical_two(rng)
        bstar, cstar = char_quadratic_u2(params)
        f1 = 1.0 + bstar + cstar
        fm1 = 1.0 - bstar + cstar
        if not (f1 > 0.0 and fm1 > 0.0 and cstar < 1.0):
            if len(failures) < MAX_RECORDED_FAILURES:
                failures.append({"params": params.as_args(),
                                 "F1": f1, "Fm1": fm1, "Cstar": cstar})
    return SuiteResult("sign-conditions", passed=not failures,
                       checked=param_sets, failures=failures)


def eigen_agreement_suite(rng: np.random.Generator, param_sets: int,
                          tol: float = 1e-10) -> SuiteResult:
    """Closed-form eigenvalues must match the generic 3x3 solver at every
    fixed point, componentwise after (re, im) sorting."""
    failures = []
    checked = 0
    for _ in range(param_sets):
        params = sample_critical_two(rng)
        for fp in fixed_points(params):
            checked += 1
            numeric = eigenvalues_numeric(jacobian(params, fp.location))
            err = max(abs(a - b) for a, b in zip(fp.eigenvalues, numeric))
            if err > tol and len(failures) < MAX_RECORDED_FAILURES:
                failures.append({"params": params.as_args(), "label": fp.label,
                                 "error": err})
    return SuiteResult("eigenvalue-agreement", passed=not failures,
                       checked=checked, failures=failures)


def run_suites(params: ModelParams, seed: int, samples: int = 10_000,
               param_samples: int = 1_000, period_samples: int = 1_000,
               pmax: int = 64) -> list[SuiteResult]:
    """The verification bundle for one parameter set.

    Per-parameter suites (invariance, monotonicity, period absence) run on
    `params`; the sign-condition suite draws its own random critical sets.
    Each suite gets an independent stream derived from `seed`.
    """
    regime = classify_regime(params)
    if regime.kind is RegimeKind.INADMISSIBLE:
        raise ValueError(
            f"verification requires admissible parameters; violated: "
            f"{', '.join(regime.violations)}")
    streams = [np.random.default_rng([seed, i]) for i in range(6)]
    orbits = max(1, samples // 50)
    return [
        omega_invariance_suite(params, streams[0], samples),
        omega1_invariance_suite(params, streams[1], samples),
        omega2_invariance_suite(params, streams[2], samples),
        monotone_z_suite(params, streams[3], orbits),
        period_absence_suite(params, streams[4], period_samples, pmax=pmax),
        sign_condition_suite(streams[5], param_samples),
    ]

"""Model parameters, states, the one-step map, and the invariant region.

The map advances a glucose/insulin/beta-cell state (x, y, z) by one day:

    x' = g0 + x * (1 - g1 - c*y)
    y' = s1*x^2 / (s2 + x^2) * z + (1 - k) * y
    z' = (1 - d0 + r1*x - r2*x^2) * z

Admissible parameters keep the box

    Omega = { g0 <= x <= A,  0 <= y <= B,  0 <= z <= C }

invariant under the map, with A, B, C given by :func:`domain_bounds`.
Everything in this module is a pure function of its arguments; values are
immutable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

__all__ = [
    "DomainFault",
    "PreconditionFault",
    "ModelParams",
    "State",
    "DomainBounds",
    "RegimeKind",
    "CriticalExtras",
    "Regime",
    "PARAM_KEYS",
    "step",
    "step_many",
    "domain_bounds",
    "classify_regime",
    "in_omega",
    "in_omega1",
    "in_omega2",
    "omega_mask",
    "omega1_mask",
    "omega2_mask",
    "u1_point",
    "u2_point",
    "params_from_dict",
    "params_to_dict",
]


class DomainFault(ArithmeticError):
    """A computed quantity left its mathematical domain (negative state
    component, negative radicand)."""


class PreconditionFault(ValueError):
    """An operation was called outside its stated precondition."""


PARAM_KEYS = ("g0", "g1", "c", "s1", "s2", "k", "d0", "r1", "r2")

#: Default relative tolerance for detecting the critical tangency
#: r1^2 = 4*r2*d0.  Overridable per call in :func:`classify_regime`.
CRITICAL_RTOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """The nine positive model constants.

    g0: glucose infusion rate (mg/dl/day)
    g1: insulin-independent glucose uptake rate (1/day)
    c:  insulin sensitivity (ml/uU/day)
    s1: secretory capacity per beta-cell (uU*dl/ml/mg/day)
    s2: Hill half-saturation scale (mg^2/dl^2)
    k:  insulin clearance rate (1/day)
    d0: beta-cell death rate at zero glucose (1/day)
    r1: beta-cell growth coefficient (mg^-1 dl day^-1)
    r2: beta-cell apoptosis coefficient (mg^-2 dl^2 day^-1)
    """

    g0: float
    g1: float
    c: float
    s1: float
    s2: float
    k: float
    d0: float
    r1: float
    r2: float

    def __post_init__(self):
        for key in PARAM_KEYS:
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise TypeError(f"parameter {key} must be a real number, got {v!r}")
            v = float(v)
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"parameter {key} must be finite and > 0, got {v!r}")
            object.__setattr__(self, key, v)

    def as_args(self) -> tuple[float, ...]:
        """The nine constants in kernel argument order."""
        return (self.g0, self.g1, self.c, self.s1, self.s2,
                self.k, self.d0, self.r1, self.r2)


class State(NamedTuple):
    """One (glucose, insulin, beta-cell mass) triple in (mg/dl, uU/ml, mg)."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class DomainBounds:
    """Upper corner (A, B, C) of the invariant box Omega."""

    A: float
    B: float
    C: float


class RegimeKind(str, Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    INADMISSIBLE = "Inadmissible"


@dataclass(frozen=True)
class CriticalExtras:
    """Sub-verdict for the critical regime: do the extra inequalities that
    place the interior fixed point inside Omega hold?"""

    two_fixed_points: bool
    failed: tuple[str, ...] = ()


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    violations: tuple[str, ...] = ()
    critical_extras: CriticalExtras | None = None


# Named admissibility conditions, in the fixed order they are checked.
COND_G1 = "0<g1<1"
COND_K = "0<k<=1"
COND_D0 = "0<d0<=1"
COND_GA = "g0/g1<=A"
COND_TANGENT = "r1^2<=4*r2*d0"
# Extra conditions for the two-fixed-point case, same order as reported.
EXTRA_LEFT = "g1*r1/(2*r2)<g0"
EXTRA_RIGHT = "g0<r1/(2*r2)"
EXTRA_S2 = "s2*r2*(2*r2*g0-g1*r1)<=d0*(r1-2*r2*g0)"


def step(params: ModelParams, s: State) -> State:
    """Apply the map once.

    Requires a componentwise nonnegative state.  Raises :class:`DomainFault`
    if an output component is negative, which can only happen for inputs
    outside Omega; the trajectory layer converts this into a flagged exit
    instead of an exception.
    """
    x, y, z = s
    if x < 0.0 or y < 0.0 or z < 0.0:
        raise PreconditionFault(f"state must be componentwise >= 0, got {tuple(s)}")
    # Expression order is load-bearing: the compiled and vectorized kernels
    # replicate it exactly so that trajectories are bit-reproducible.
    x1 = params.g0 + x * (1.0 - params.g1 - params.c * y)
    y1 = params.s1 * x * x / (params.s2 + x * x) * z + (1.0 - params.k) * y
    z1 = (1.0 - params.d0 + params.r1 * x - params.r2 * x * x) * z
    if x1 < 0.0 or y1 < 0.0 or z1 < 0.0:
        raise DomainFault(f"map left the nonnegative octant: {(x1, y1, z1)}")
    return State(x1, y1, z1)


def step_many(params: ModelParams, states: np.ndarray) -> np.ndarray:
    """Vectorized :func:`step` over an (n, 3) array of states.

    Bit-identical to the scalar path; no domain check is performed.
    """
    states = np.asarray(states, dtype=np.float64)
    x = states[..., 0]
    y = states[..., 1]
    z = states[..., 2]
    x1 = params.g0 + x * (1.0 - params.g1 - params.c * y)
    y1 = params.s1 * x * x / (params.s2 + x * x) * z + (1.0 - params.k) * y
    z1 = (1.0 - params.d0 + params.r1 * x - params.r2 * x * x) * z
    return np.stack([x1, y1, z1], axis=-1)


def domain_bounds(params: ModelParams) -> DomainBounds:
    """Closed-form upper corner of Omega.

    A = (r1 + sqrt(r1^2 + 4*r2*(1 - d0))) / (2*r2)
    B = (1 - g1) / c
    C = (1 - g1) * k / (s1 * c)
    """
    rad = params.r1 * params.r1 + 4.0 * params.r2 * (1.0 - params.d0)
    if rad < 0.0:
        raise DomainFault(f"r1^2 + 4*r2*(1-d0) = {rad} < 0; A is not real")
    A = (params.r1 + math.sqrt(rad)) / (2.0 * params.r2)
    B = (1.0 - params.g1) / params.c
    C = (1.0 - params.g1) * params.k / (params.s1 * params.c)
    return DomainBounds(A, B, C)


def classify_regime(params: ModelParams, *, critical_rtol: float = CRITICAL_RTOL) -> Regime:
    """Check the admissibility conditions in fixed order and classify.

    Subcritical: all conditions hold with strict r1^2 < 4*r2*d0.
    Critical: all hold with r1^2 = 4*r2*d0 up to relative tolerance
    `critical_rtol`; the extra two-fixed-point inequalities are then
    evaluated into `critical_extras`.  Anything else is Inadmissible with
    the violated conditions listed by name.
    """
    g0, g1, c, s1, s2, k, d0, r1, r2 = params.as_args()
    violations = []
    if not (0.0 < g1 < 1.0):
        violations.append(COND_G1)
    if not (0.0 < k <= 1.0):
        violations.append(COND_K)
    if not (0.0 < d0 <= 1.0):
        violations.append(COND_D0)
    # g0/g1 <= A evaluated as g0 <= g1*A (no division); if A is not real the
    # condition cannot hold.
    rad = r1 * r1 + 4.0 * r2 * (1.0 - d0)
    if rad < 0.0:
        violations.append(COND_GA)
    else:
        A = (r1 + math.sqrt(rad)) / (2.0 * r2)
        if not (g0 <= g1 * A):
            violations.append(COND_GA)
    lhs = r1 * r1
    rhs = 4.0 * r2 * d0
    at_tangency = abs(lhs - rhs) <= critical_rtol * max(lhs, rhs)
    if not at_tangency and not (lhs < rhs):
        violations.append(COND_TANGENT)
    if violations:
        return Regime(RegimeKind.INADMISSIBLE, tuple(violations))
    if not at_tangency:
        return Regime(RegimeKind.SUBCRITICAL)
    failed = []
    if not (g1 * r1 < 2.0 * r2 * g0):
        failed.append(EXTRA_LEFT)
    if not (2.0 * r2 * g0 < r1):
        failed.append(EXTRA_RIGHT)
    if not (s2 * r2 * (2.0 * r2 * g0 - g1 * r1) <= d0 * (r1 - 2.0 * r2 * g0)):
        failed.append(EXTRA_S2)
    extras = CriticalExtras(two_fixed_points=not failed, failed=tuple(failed))
    return Regime(RegimeKind.CRITICAL, (), extras)


def u1_point(params: ModelParams) -> State:
    """The boundary fixed point (g0/g1, 0, 0)."""
    return State(params.g0 / params.g1, 0.0, 0.0)


def u2_point(params: ModelParams) -> State:
    """The interior fixed point (x*, y*, z*), taken as a purely algebraic
    object; whether it lies in Omega is the regime classifier's business."""
    xs = params.r1 / (2.0 * params.r2)
    ys = (params.g0 - params.g1 * xs) / (params.c * xs)
    zs = params.k * ys * (params.s2 + xs * xs) / (params.s1 * xs * xs)
    return State(xs, ys, zs)


def in_omega(params: ModelParams, s: State, bounds: DomainBounds | None = None) -> bool:
    """Closed-inequality membership in Omega (exact comparisons, no slack)."""
    if bounds is None:
        bounds = domain_bounds(params)
    x, y, z = s
    return (params.g0 <= x <= bounds.A) and (0.0 <= y <= bounds.B) and (0.0 <= z <= bounds.C)


def in_omega1(params: ModelParams, s: State, bounds: DomainBounds | None = None) -> bool:
    """Membership in Omega_1 = Omega intersected with x <= g0/g1."""
    return in_omega(params, s, bounds) and s[0] <= params.g0 / params.g1


def in_omega2(params: ModelParams, s: State, bounds: DomainBounds | None = None) -> bool:
    """Membership in Omega_2 = Omega_1 intersected with z < z* (strict).

    Only defined in the critical two-fixed-point regime; raises
    :class:`PreconditionFault` when z* does not exist.
    """
    regime = classify_regime(params)
    if (regime.kind is not RegimeKind.CRITICAL
            or regime.critical_extras is None
            or not regime.critical_extras.two_fixed_points):
        raise PreconditionFault(
            "Omega_2 requires the critical regime with two fixed points")
    return in_omega1(params, s, bounds) and s[2] < u2_point(params).z


def omega_mask(params: ModelParams, states: np.ndarray,
               bounds: DomainBounds | None = None) -> np.ndarray:
    """Vectorized Omega membership for an (n, 3) state array."""
    if bounds is None:
        bounds = domain_bounds(params)
    x = states[..., 0]
    y = states[..., 1]
    z = states[..., 2]
    return ((params.g0 <= x) & (x <= bounds.A)
            & (0.0 <= y) & (y <= bounds.B)
            & (0.0 <= z) & (z <= bounds.C))


def omega1_mask(params: ModelParams, states: np.ndarray,
                bounds: DomainBounds | None = None) -> np.ndarray:
    return omega_mask(params, states, bounds) & (states[..., 0] <= params.g0 / params.g1)


def omega2_mask(params: ModelParams, states: np.ndarray,
                zstar: float, bounds: DomainBounds | None = None) -> np.ndarray:
    """Vectorized Omega_2 membership; the caller supplies z* (so that
    trajectory bookkeeping can pass NaN when it does not exist, yielding an
    all-False mask)."""
    return omega1_mask(params, states, bounds) & (states[..., 2] < zstar)


def params_from_dict(d: dict) -> ModelParams:
    """Build parameters from a flat mapping with exactly the nine keys."""
    if not isinstance(d, dict):
        raise ValueError(f"parameters must be a JSON object, got {type(d).__name__}")
    unknown = sorted(set(d) - set(PARAM_KEYS))
    if unknown:
        raise ValueError(f"unknown parameter keys: {', '.join(unknown)}")
    missing = [key for key in PARAM_KEYS if key not in d]
    if missing:
        raise ValueError(f"missing parameter keys: {', '.join(missing)}")
    return ModelParams(**{key: d[key] for key in PARAM_KEYS})


def params_to_dict(params: ModelParams) -> dict:
    return {key: getattr(params, key) for key in PARAM_KEYS}

"""Fixed points of the map and their linear stability.

Two candidate fixed points exist: the boundary point u1 = (g0/g1, 0, 0)
and the interior point u2 = (x*, y*, z*) with

    x* = r1 / (2*r2)
    y* = (g0 - g1*x*) / (c*x*)
    z* = k*y* * (s2 + x*^2) / (s1*x*^2)

u1 always lies in Omega for admissible parameters; u2 lies in Omega exactly
in the critical regime with the extra inequalities, which is when it is
reported.  Eigenvalues come from closed forms (the Jacobian at u1 is
triangular; at u2 the characteristic polynomial factors as
(lambda - 1)(lambda^2 + B*lambda + C*)); a generic numeric eigenvalue
routine is kept alongside purely as a cross-check oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import (
    DomainBounds,
    DomainFault,
    ModelParams,
    PreconditionFault,
    Regime,
    RegimeKind,
    State,
    classify_regime,
    domain_bounds,
    in_omega,
    step,
    u1_point,
    u2_point,
)

__all__ = [
    "StabilityKind",
    "StabilityClass",
    "FixedPoint",
    "QuadraticCase",
    "QuadraticRootCase",
    "fixed_points",
    "jacobian",
    "eigenvalues_u1",
    "char_quadratic_u2",
    "quadratic_roots",
    "classify_quadratic",
    "classify_eigenvalues",
    "classify_fixed_point",
    "eigenvalues_numeric",
    "u2_exclusion",
    "build_report",
    "dumps_17g",
    "render_report_text",
]

#: Max allowed sup-norm one-step residual of a constructed fixed point.
RESIDUAL_TOL = 1e-12
#: Absolute tolerance on |lambda| - 1 for hyperbolicity detection.
UNIT_CIRCLE_TOL = 1e-12
#: Absolute tolerance for the equality branches of the root classifier.
QUAD_EQ_TOL = 1e-12

BIOLOGICAL_LABELS = {"u1": "pathological", "u2": "physiological"}


class StabilityKind(str, Enum):
    ATTRACTING = "Attracting"
    REPELLING = "Repelling"
    SADDLE = "Saddle"
    NON_HYPERBOLIC = "NonHyperbolic"


@dataclass(frozen=True)
class StabilityClass:
    kind: StabilityKind
    #: "semi-attracting" when exactly one eigenvalue sits on the unit circle
    #: and the other two have modulus < 1; None otherwise.
    detail: str | None = None


@dataclass(frozen=True)
class FixedPoint:
    location: State
    label: str  # "u1" or "u2"
    eigenvalues: tuple[complex, complex, complex]  # sorted by (re, im)
    stability: StabilityClass
    in_region: bool
    residual: float

    @property
    def biological_label(self) -> str:
        return BIOLOGICAL_LABELS[self.label]


class QuadraticCase(str, Enum):
    """Cases of the unit-circle root test for lambda^2 + B*lambda + C*."""

    I1 = "i1"        # F(1)>0, F(-1)>0, C*<1: both roots inside
    I2 = "i2"        # F(1)>0, F(-1)=0, B*!=2: one root -1, other != -1
    I3 = "i3"        # F(1)>0, F(-1)<0: one inside, one outside
    I4 = "i4"        # F(1)>0, F(-1)>0, C*>1: both outside
    I5 = "i5"        # F(1)>0, -2<B*<2, C*=1: conjugate pair on the circle
    I6 = "i6"        # F(1)>0, F(-1)=0, B*=2: double root -1
    II_EQ = "ii_eq"  # F(1)=0, |C*|=1: other root on the circle
    II_LT = "ii_lt"  # F(1)=0, |C*|<1: other root inside
    II_GT = "ii_gt"  # F(1)=0, |C*|>1: other root outside
    III1_LT = "iii1_lt"  # F(1)<0, F(-1)<0: one root >1, other < -1
    III1_EQ = "iii1_eq"  # F(1)<0, F(-1)=0: one root >1, other = -1
    III2 = "iii2"        # F(1)<0, F(-1)>0: one root >1, other in (-1,1)


@dataclass(frozen=True)
class QuadraticRootCase:
    case_id: QuadraticCase
    roots: tuple[complex, complex]
    #: The sign triple (F(1), F(-1), C* - 1).
    signs: tuple[float, float, float]


def jacobian(params: ModelParams, s: State) -> np.ndarray:
    """Jacobian of the one-step map at a nonnegative state."""
    g0, g1, c, s1, s2, k, d0, r1, r2 = params.as_args()
    x, y, z = s
    h = s2 + x * x
    return np.array([
        [1.0 - g1 - c * y, -c * x, 0.0],
        [2.0 * s1 * s2 * x * z / (h * h), 1.0 - k, s1 * x * x / h],
        [(r1 - 2.0 * r2 * x) * z, 0.0, 1.0 - d0 + r1 * x - r2 * x * x],
    ])


def eigenvalues_u1(params: ModelParams) -> tuple[float, float, float]:
    """Closed-form eigenvalues at u1, in the order (1-g1, 1-k, lambda_3).

    The Jacobian at u1 is triangular, so these are its diagonal entries;
    lambda_3 = 1 - d0 + r1*g0/g1 - r2*(g0/g1)^2.
    """
    g0, g1 = params.g0, params.g1
    lam3 = 1.0 - params.d0 + params.r1 * g0 / g1 - params.r2 * g0 * g0 / (g1 * g1)
    return (1.0 - g1, 1.0 - params.k, lam3)


def char_quadratic_u2(params: ModelParams) -> tuple[float, float]:
    """Coefficients (B*, C*) of the quadratic factor at u2.

    The eigenvalues at u2 are {1} plus the roots of lambda^2 + B*lambda + C*:

        B* = k + g0/x* - 2
        C* = (1 - g0/x*)(1 - k) + 2*s2*k*c*y* / (s2 + x*^2)

    Requires the critical regime with two fixed points.
    """
    regime = classify_regime(params)
    if (regime.kind is not RegimeKind.CRITICAL
            or regime.critical_extras is None
            or not regime.critical_extras.two_fixed_points):
        raise PreconditionFault(
            "the interior fixed point requires the critical regime with the "
            "extra inequalities; regime is "
            f"{regime.kind.value}")
    xs, ys, _ = u2_point(params)
    bstar = params.k + params.g0 / xs - 2.0
    cstar = ((1.0 - params.g0 / xs) * (1.0 - params.k)
             + 2.0 * params.s2 * params.k * params.c * ys / (params.s2 + xs * xs))
    return bstar, cstar


def quadratic_roots(bstar: float, cstar: float) -> tuple[complex, complex]:
    """Roots of lambda^2 + B*lambda + C*, ordered by (re, im).

    Real roots use the sign-stable form q = -(B* + sign(B*)*sqrt(disc))/2,
    second root C*/q, to avoid cancellation.
    """
    disc = bstar * bstar - 4.0 * cstar
    if disc < 0.0:
        re = -bstar / 2.0
        im = math.sqrt(-disc) / 2.0
        return (complex(re, -im), complex(re, im))
    s = math.sqrt(disc)
    q = -(bstar + math.copysign(s, bstar)) / 2.0
    if q == 0.0:
        r1 = r2 = 0.0
    else:
        r1, r2 = q, cstar / q
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    return (complex(lo), complex(hi))


def classify_quadratic(bstar: float, cstar: float,
                       *, tol: float = QUAD_EQ_TOL) -> QuadraticRootCase:
    """Locate the roots of lambda^2 + B*lambda + C* relative to the unit
    circle from the signs of F(1), F(-1) and C* - 1.

    Sign comparisons are exact; the equality branches (F(1)=0, F(-1)=0,
    C*=1, B*=2) fire within absolute tolerance `tol`.  The classifier is
    total: every (B*, C*) pair lands in exactly one case.
    """
    f1 = 1.0 + bstar + cstar
    fm1 = 1.0 - bstar + cstar
    roots = quadratic_roots(bstar, cstar)
    signs = (f1, fm1, cstar - 1.0)

    if abs(f1) <= tol:
        # One root is 1; the other has modulus |C*|.
        mod = abs(cstar)
        if abs(mod - 1.0) <= tol:
            case = QuadraticCase.II_EQ
        elif mod < 1.0:
            case = QuadraticCase.II_LT
        else:
            case = QuadraticCase.II_GT
    elif f1 > 0.0:
        if abs(fm1) <= tol:
            # -1 is a root; i6 keys on B* = 2 (double root).
            case = QuadraticCase.I6 if abs(bstar - 2.0) <= tol else QuadraticCase.I2
        elif fm1 < 0.0:
            case = QuadraticCase.I3
        elif abs(cstar - 1.0) <= tol:
            # F(1)>0 and F(-1)>0 force -2 < B* < 2 here.
            case = QuadraticCase.I5
        elif cstar < 1.0:
            case = QuadraticCase.I1
        else:
            case = QuadraticCase.I4
    else:
        if abs(fm1) <= tol:
            case = QuadraticCase.III1_EQ
        elif fm1 < 0.0:
            case = QuadraticCase.III1_LT
        else:
            case = QuadraticCase.III2
    return QuadraticRootCase(case, roots, signs)


def classify_eigenvalues(eigenvalues, *, tol: float = UNIT_CIRCLE_TOL) -> StabilityClass:
    """Stability class from eigenvalue moduli.

    All moduli < 1: attracting; all > 1: repelling; mixed with none on the
    unit circle: saddle.  Any modulus within `tol` of 1 makes the point
    non-hyperbolic, with the "semi-attracting" detail when exactly one
    eigenvalue sits on the circle and the rest are inside.
    """
    moduli = [abs(lam) for lam in eigenvalues]
    on_circle = [abs(m - 1.0) <= tol for m in moduli]
    if any(on_circle):
        inside = [m < 1.0 for m, circ in zip(moduli, on_circle) if not circ]
        detail = "semi-attracting" if sum(on_circle) == 1 and all(inside) else None
        return StabilityClass(StabilityKind.NON_HYPERBOLIC, detail)
    if all(m < 1.0 for m in moduli):
        return StabilityClass(StabilityKind.ATTRACTING)
    if all(m > 1.0 for m in moduli):
        return StabilityClass(StabilityKind.REPELLING)
    return StabilityClass(StabilityKind.SADDLE)


def classify_fixed_point(params: ModelParams, fp: FixedPoint) -> StabilityClass:
    """Re-derive the stability class of a record from the closed forms."""
    if fp.label == "u1":
        return classify_eigenvalues(eigenvalues_u1(params))
    bstar, cstar = char_quadratic_u2(params)
    return classify_eigenvalues((1.0,) + quadratic_roots(bstar, cstar))


def eigenvalues_numeric(m) -> tuple[complex, complex, complex]:
    """Generic eigenvalues of a 3x3 matrix, sorted by (re, im).

    Cross-check oracle for the closed forms; not used on the primary path.
    """
    vals = np.linalg.eigvals(np.asarray(m, dtype=np.float64))
    ordered = sorted((complex(v) for v in vals), key=lambda lam: (lam.real, lam.imag))
    return (ordered[0], ordered[1], ordered[2])


def _sorted_eigs(eigenvalues) -> tuple[complex, complex, complex]:
    ordered = sorted((complex(v) for v in eigenvalues),
                     key=lambda lam: (lam.real, lam.imag))
    return (ordered[0], ordered[1], ordered[2])


def _make_record(params: ModelParams, label: str, location: State,
                 eigenvalues, bounds: DomainBounds) -> FixedPoint:
    nxt = step(params, location)
    residual = max(abs(nxt.x - location.x), abs(nxt.y - location.y),
                   abs(nxt.z - location.z))
    if residual > RESIDUAL_TOL:
        raise DomainFault(
            f"fixed point {label} has one-step residual {residual:.3e} > {RESIDUAL_TOL}")
    eigs = _sorted_eigs(eigenvalues)
    return FixedPoint(
        location=location,
        label=label,
        eigenvalues=eigs,
        stability=classify_eigenvalues(eigs),
        in_region=in_omega(params, location, bounds),
        residual=residual,
    )


def fixed_points(params: ModelParams, *, regime: Regime | None = None) -> list[FixedPoint]:
    """All fixed points in Omega, u1 first.

    Subcritical: [u1].  Critical with the extra inequalities: [u1, u2].
    Critical without them: [u1] (the interior point exists algebraically but
    falls outside Omega; see :func:`u2_exclusion` for the diagnostic).
    Raises :class:`PreconditionFault` for inadmissible parameters.
    """
    if regime is None:
        regime = classify_regime(params)
    if regime.kind is RegimeKind.INADMISSIBLE:
        raise PreconditionFault(
            f"fixed points are only defined for admissible parameters; "
            f"violated: {', '.join(regime.violations)}")
    bounds = domain_bounds(params)
    records = [_make_record(params, "u1", u1_point(params),
                            eigenvalues_u1(params), bounds)]
    if (regime.kind is RegimeKind.CRITICAL
            and regime.critical_extras is not None
            and regime.critical_extras.two_fixed_points):
        xs, ys, zs = u2_point(params)
        bstar = params.k + params.g0 / xs - 2.0
        cstar = ((1.0 - params.g0 / xs) * (1.0 - params.k)
                 + 2.0 * params.s2 * params.k * params.c * ys / (params.s2 + xs * xs))
        eigs = (complex(1.0),) + quadratic_roots(bstar, cstar)
        records.append(_make_record(params, "u2", State(xs, ys, zs), eigs, bounds))
    return records


def u2_exclusion(params: ModelParams, *, regime: Regime | None = None) -> dict | None:
    """Diagnostic for the critical regime when the interior point is
    excluded: its algebraic location and the failed inequalities."""
    if regime is None:
        regime = classify_regime(params)
    if (regime.kind is not RegimeKind.CRITICAL
            or regime.critical_extras is None
            or regime.critical_extras.two_fixed_points):
        return None
    return {
        "excluded": "u2",
        "location": list(u2_point(params)),
        "failed": list(regime.critical_extras.failed),
    }


# ---------------------------------------------------------------------------
# Analysis report


def build_report(params: ModelParams) -> dict:
    """Analysis report: regime, bounds, fixed points, violations.

    The report is emitted for inadmissible parameters too (empty fixed-point
    list), so callers can render the violations.
    """
    regime = classify_regime(params)
    report: dict = {"regime": regime.kind.value}
    try:
        b = domain_bounds(params)
        report["bounds"] = {"A": b.A, "B": b.B, "C": b.C}
    except DomainFault:
        report["bounds"] = None
    if regime.kind is RegimeKind.INADMISSIBLE:
        report["fixed_points"] = []
    else:
        report["fixed_points"] = [
            {
                "label": fp.label,
                "location": list(fp.location),
                "eigenvalues": [[lam.real, lam.imag] for lam in fp.eigenvalues],
                "stability": fp.stability.kind.value,
                "stability_detail": fp.stability.detail,
                "biological_label": fp.biological_label,
                "in_region": fp.in_region,
                "residual": fp.residual,
            }
            for fp in fixed_points(params, regime=regime)
        ]
    report["violations"] = list(regime.violations)
    if regime.critical_extras is not None:
        report["critical_extras"] = {
            "two_fixed_points": regime.critical_extras.two_fixed_points,
            "failed": list(regime.critical_extras.failed),
        }
    diag = u2_exclusion(params, regime=regime)
    if diag is not None:
        report["diagnostics"] = diag
    report["params"] = {key: getattr(params, key) for key in
                        ("g0", "g1", "c", "s1", "s2", "k", "d0", "r1", "r2")}
    return report


def _emit_17g(obj, out: list, indent: int, level: int) -> None:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            out.append(pad_in)
            out.append(f"{_json_str(key)}: ")
            _emit_17g(val, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, val in enumerate(obj):
            out.append(pad_in)
            _emit_17g(val, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite number in report: {obj!r}")
        out.append(format(obj, ".17g"))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(_json_str(obj))
    elif obj is None:
        out.append("null")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json_str(s: str) -> str:
    import json

    return json.dumps(s)


def dumps_17g(obj, *, indent: int = 2) -> str:
    """JSON text with floats rendered to 17 significant digits."""
    out: list = []
    _emit_17g(obj, out, indent, 0)
    return "".join(out)


def render_report_text(report: dict) -> str:
    """Human-readable rendering of :func:`build_report` output."""
    lines = [f"regime: {report['regime']}"]
    extras = report.get("critical_extras")
    if extras is not None:
        if extras["two_fixed_points"]:
            lines[-1] += " (two fixed points)"
        else:
            lines[-1] += f" (one fixed point; failed: {'; '.join(extras['failed'])})"
    if report["violations"]:
        lines.append("violated conditions: " + "; ".join(report["violations"]))
    if report["bounds"] is not None:
        b = report["bounds"]
        lines.append(f"bounds: A={b['A']!r} B={b['B']!r} C={b['C']!r}")
    else:
        lines.append("bounds: undefined (negative radicand)")
    for fp in report["fixed_points"]:
        x, y, z = fp["location"]
        lines.append(f"fixed point {fp['label']} ({fp['biological_label']}): "
                     f"({x!r}, {y!r}, {z!r})")
        eigs = ", ".join(
            f"{re!r}" if im == 0.0 else f"({re!r}{'+' if im >= 0 else '-'}{abs(im)!r}j)"
            for re, im in fp["eigenvalues"])
        lines.append(f"  eigenvalues: {eigs}")
        stab = fp["stability"]
        if fp["stability_detail"]:
            stab += f" ({fp['stability_detail']})"
        lines.append(f"  stability: {stab}; in Omega: {'yes' if fp['in_region'] else 'no'}")
    diag = report.get("diagnostics")
    if diag is not None:
        x, y, z = diag["location"]
        lines.append(f"note: interior point ({x!r}, {y!r}, {z!r}) excluded; "
                     f"failed: {'; '.join(diag['failed'])}")
    return "\n".join(lines) + "\n"

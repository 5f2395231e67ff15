"""Orbits of the map: iteration, convergence, period search, basins.

All computations run through the kernel backend selected in
:mod:`toppmap.kernels`; results are identical (bitwise) either way.
Iteration is total on nonnegative states whether or not they lie in Omega;
leaving Omega is recorded, leaving the nonnegative octant is a fault at the
library level and a verdict at the trajectory level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import kernels
from .model import (
    DomainFault,
    ModelParams,
    PreconditionFault,
    RegimeKind,
    State,
    classify_regime,
    domain_bounds,
    in_omega,
    omega_mask,
    u2_point,
)
from .stability import FixedPoint, fixed_points

__all__ = [
    "Verdict",
    "Trajectory",
    "ConvergenceResult",
    "BasinLabel",
    "AxisSpec",
    "GridSpec",
    "iterate",
    "run_to_convergence",
    "detect_period",
    "classify_basin",
    "check_monotone_z",
    "sweep_grid",
    "basin_counts",
    "write_trajectory_csv",
    "write_basin_csv",
    "TRAJECTORY_HEADER",
    "BASIN_HEADER",
]

#: Convergence defaults: the interior fixed point has a unit eigenvalue, so
#: critical-regime convergence is sub-geometric and gets a looser default.
DEFAULT_TOL_SUBCRITICAL = 1e-8
DEFAULT_TOL_CRITICAL = 1e-4
DEFAULT_MAX_ITER = 10**6


class Verdict(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    EXITED_DOMAIN = "ExitedDomain"


@dataclass(frozen=True)
class Trajectory:
    """A stored orbit with per-state region membership.

    ``states[i + 1]`` is exactly the one-step image of ``states[i]``; the
    membership arrays use closed comparisons against the domain bounds, and
    ``in_omega2`` is all-False when z* does not exist.  ``omega_exit`` is
    the index of the first state outside Omega, if any.
    """

    params: ModelParams
    states: np.ndarray
    in_omega: np.ndarray
    in_omega1: np.ndarray
    in_omega2: np.ndarray
    omega_exit: int | None

    def __len__(self) -> int:
        return self.states.shape[0]

    def state(self, i: int) -> State:
        return State(*(float(v) for v in self.states[i]))


@dataclass(frozen=True)
class ConvergenceResult:
    """Outcome of iterating toward the known fixed points.

    ``achieved_residual`` is the final sup-norm distance to the reached
    target; for MaxIterations it is the distance to the nearest fixed point,
    for ExitedDomain it is infinite.
    """

    limit: State | None
    target: str | None
    iterations: int
    achieved_residual: float
    verdict: Verdict


@dataclass(frozen=True)
class BasinLabel:
    """Empirical basin membership of one initial state.

    The hypothesis flags record whether x(n) > g0/g1, respectively
    z(n) > z*, held at every observed state (z-flag is False when z* does
    not exist).  They are reported, never used as predictors.
    """

    initial: State
    label: str  # "u1" | "u2" | "undecided"
    iterations: int
    x_hypothesis: bool
    z_hypothesis: bool


@dataclass(frozen=True)
class AxisSpec:
    """One lattice axis: `count` evenly spaced values from lo to hi."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("axis endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"axis lo {self.lo} > hi {self.hi}")
        if self.count < 1:
            raise ValueError(f"axis count must be >= 1, got {self.count}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class GridSpec:
    x: AxisSpec
    y: AxisSpec
    z: AxisSpec

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        unknown = sorted(set(d) - {"x", "y", "z"})
        if unknown:
            raise ValueError(f"unknown grid keys: {', '.join(unknown)}")
        axes = {}
        for name in ("x", "y", "z"):
            if name not in d:
                raise ValueError(f"grid is missing axis {name}")
            spec = d[name]
            if not (isinstance(spec, (list, tuple)) and len(spec) == 3):
                raise ValueError(f"grid axis {name} must be [lo, hi, count]")
            axes[name] = AxisSpec(float(spec[0]), float(spec[1]), int(spec[2]))
        return cls(**axes)

    def to_dict(self) -> dict:
        return {name: [ax.lo, ax.hi, ax.count]
                for name, ax in (("x", self.x), ("y", self.y), ("z", self.z))}


def iterate(params: ModelParams, s0, n: int, *,
            allow_inadmissible: bool = False) -> Trajectory:
    """Record n steps of the orbit of s0 (n+1 states).

    Region bookkeeping requires admissible parameters; passing
    ``allow_inadmissible=True`` iterates anyway with the membership arrays
    all False.  Raises :class:`DomainFault` if a component goes negative.
    """
    if n < 0:
        raise PreconditionFault(f"step count must be >= 0, got {n}")
    x0, y0, z0 = (float(v) for v in s0)
    regime = classify_regime(params)
    if regime.kind is RegimeKind.INADMISSIBLE and not allow_inadmissible:
        raise PreconditionFault(
            "inadmissible parameters; pass allow_inadmissible=True to iterate "
            f"anyway (violated: {', '.join(regime.violations)})")
    states = np.empty((n + 1, 3), dtype=np.float64)
    neg = kernels.iterate_into(*params.as_args(), x0, y0, z0, states)
    if neg >= 0:
        raise DomainFault(
            f"orbit left the nonnegative octant at step {neg}: "
            f"{tuple(states[neg])}")
    if regime.kind is RegimeKind.INADMISSIBLE:
        flags = np.zeros(n + 1, dtype=bool)
        return Trajectory(params, states, flags, flags.copy(), flags.copy(), None)
    bounds = domain_bounds(params)
    om = omega_mask(params, states, bounds)
    om1 = om & (states[:, 0] <= params.g0 / params.g1)
    extras = regime.critical_extras
    if extras is not None and extras.two_fixed_points:
        zstar = u2_point(params).z
    else:
        zstar = math.nan  # comparison below is all-False
    om2 = om1 & (states[:, 2] < zstar)
    outside = np.flatnonzero(~om)
    omega_exit = int(outside[0]) if outside.size else None
    return Trajectory(params, states, om, om1, om2, omega_exit)


def _targets_of(fps: list[FixedPoint]) -> tuple[np.ndarray, float]:
    targets = np.array([list(fp.location) for fp in fps], dtype=np.float64)
    zstar = fps[1].location.z if len(fps) > 1 else math.nan
    return targets, zstar


def _default_tol(regime) -> float:
    return (DEFAULT_TOL_CRITICAL if regime.kind is RegimeKind.CRITICAL
            else DEFAULT_TOL_SUBCRITICAL)


def _converge_raw(params: ModelParams, s0, tol: float | None, max_iter: int):
    if tol is not None and not tol > 0.0:
        raise PreconditionFault(f"tolerance must be > 0, got {tol}")
    if max_iter < 1:
        raise PreconditionFault(f"max_iter must be >= 1, got {max_iter}")
    regime = classify_regime(params)
    fps = fixed_points(params, regime=regime)
    if tol is None:
        tol = _default_tol(regime)
    targets, zstar = _targets_of(fps)
    x0, y0, z0 = (float(v) for v in s0)
    raw = kernels.converge(*params.as_args(), x0, y0, z0, targets,
                           params.g0 / params.g1, zstar, tol, max_iter)
    return fps, targets, raw


def run_to_convergence(params: ModelParams, s0, tol: float | None = None,
                       max_iter: int = DEFAULT_MAX_ITER) -> ConvergenceResult:
    """Iterate until a fixed point is reached, the budget runs out, or the
    orbit leaves the nonnegative octant.

    Acceptance needs both proximity (sup-norm distance to a known fixed
    point <= tol) and a one-step residual <= tol; near the non-hyperbolic
    interior point, proximity alone can be met transiently.  ``tol=None``
    picks the regime default (1e-8 subcritical, 1e-4 critical).
    """
    fps, targets, raw = _converge_raw(params, s0, tol, max_iter)
    code, iters, x, y, z, tid, _, _ = raw
    final = np.array([x, y, z])
    if code == kernels.CODE_CONVERGED:
        fp = fps[tid]
        resid = float(np.max(np.abs(final - targets[tid])))
        return ConvergenceResult(fp.location, fp.label, iters, resid,
                                 Verdict.CONVERGED)
    if code == kernels.CODE_MAX_ITER:
        resid = float(min(np.max(np.abs(final - t)) for t in targets))
        return ConvergenceResult(None, None, iters, resid, Verdict.MAX_ITERATIONS)
    return ConvergenceResult(None, None, iters, math.inf, Verdict.EXITED_DOMAIN)


def detect_period(params: ModelParams, s0, pmax: int, tol: float = 1e-10,
                  burn_in: int = 0) -> int | None:
    """Smallest p in 1..pmax with sup|W^p(u) - u| <= tol at the point u
    reached after `burn_in` iterations of s0; None if there is none.

    p = 1 means a fixed point (within tol).
    """
    if pmax < 1:
        raise PreconditionFault(f"pmax must be >= 1, got {pmax}")
    if burn_in < 0:
        raise PreconditionFault(f"burn_in must be >= 0, got {burn_in}")
    x, y, z = (float(v) for v in s0)
    if burn_in:
        x, y, z, neg = kernels.step_n(*params.as_args(), x, y, z, burn_in)
        if neg >= 0:
            raise DomainFault(f"orbit left the nonnegative octant at step {neg}")
    p = kernels.period_scan(*params.as_args(), x, y, z, pmax, tol)
    return p if p > 0 else None


def classify_basin(params: ModelParams, s0, tol: float | None = None,
                   max_iter: int = DEFAULT_MAX_ITER) -> BasinLabel:
    """Empirical basin label of s0 plus the two orbit-hypothesis flags."""
    fps, _, raw = _converge_raw(params, s0, tol, max_iter)
    code, iters, _, _, _, tid, x_hyp, z_hyp = raw
    label = fps[tid].label if code == kernels.CODE_CONVERGED else "undecided"
    return BasinLabel(State(*(float(v) for v in s0)), label, iters,
                      bool(x_hyp), bool(z_hyp))


def check_monotone_z(traj: Trajectory) -> tuple[bool, int | None]:
    """Whether z is non-increasing along the trajectory.

    Returns (True, None), or (False, i) for the first i with
    states[i+1].z > states[i].z.
    """
    zs = traj.states[:, 2]
    bad = np.flatnonzero(zs[1:] > zs[:-1])
    if bad.size:
        return False, int(bad[0])
    return True, None


def sweep_grid(params: ModelParams, grid: GridSpec, tol: float | None = None,
               max_iter: int = DEFAULT_MAX_ITER) -> list[BasinLabel]:
    """Basin labels over the lattice, row-major in (x, y, z).

    Lattice points outside Omega are skipped (the sweep is a verification
    surface for in-region behavior).  The result is independent of
    evaluation order.
    """
    regime = classify_regime(params)
    fps = fixed_points(params, regime=regime)  # raises if inadmissible
    if tol is None:
        tol = _default_tol(regime)
    bounds = domain_bounds(params)
    targets, zstar = _targets_of(fps)
    gx = params.g0 / params.g1
    args = params.as_args()
    labels = []
    for x in grid.x.values():
        for y in grid.y.values():
            for z in grid.z.values():
                s = State(float(x), float(y), float(z))
                if not in_omega(params, s, bounds):
                    continue
                code, iters, _, _, _, tid, x_hyp, z_hyp = kernels.converge(
                    *args, s.x, s.y, s.z, targets, gx, zstar, tol, max_iter)
                label = fps[tid].label if code == kernels.CODE_CONVERGED else "undecided"
                labels.append(BasinLabel(s, label, iters, bool(x_hyp), bool(z_hyp)))
    return labels


def basin_counts(labels: list[BasinLabel]) -> dict[str, int]:
    counts = {"u1": 0, "u2": 0, "undecided": 0}
    for rec in labels:
        counts[rec.label] += 1
    return counts


# ---------------------------------------------------------------------------
# CSV output (UTF-8, LF line endings, shortest round-trip floats)

TRAJECTORY_HEADER = "n,x,y,z,in_omega,in_omega1,in_omega2"
BASIN_HEADER = "x0,y0,z0,label,iterations,x_hyp,z_hyp"


def _open_for_write(dest):
    if hasattr(dest, "write"):
        return dest, False
    return Path(dest).open("w", encoding="utf-8", newline="\n"), True


def write_trajectory_csv(traj: Trajectory, dest, stride: int = 1) -> int:
    """Write the trajectory, keeping every stride-th state plus the final
    one.  Returns the number of data rows written."""
    if stride < 1:
        raise PreconditionFault(f"stride must be >= 1, got {stride}")
    n = traj.states.shape[0] - 1
    indices = list(range(0, n + 1, stride))
    if indices[-1] != n:
        indices.append(n)
    f, owned = _open_for_write(dest)
    try:
        f.write(TRAJECTORY_HEADER + "\n")
        for i in indices:
            x, y, z = traj.states[i]
            f.write(f"{i},{float(x)!r},{float(y)!r},{float(z)!r},"
                    f"{int(traj.in_omega[i])},{int(traj.in_omega1[i])},"
                    f"{int(traj.in_omega2[i])}\n")
    finally:
        if owned:
            f.close()
    return len(indices)


def write_basin_csv(labels: list[BasinLabel], dest) -> int:
    """Write one row per basin label, in the given order."""
    f, owned = _open_for_write(dest)
    try:
        f.write(BASIN_HEADER + "\n")
        for rec in labels:
            x, y, z = rec.initial
            f.write(f"{float(x)!r},{float(y)!r},{float(z)!r},{rec.label},"
                    f"{rec.iterations},{int(rec.x_hypothesis)},"
                    f"{int(rec.z_hypothesis)}\n")
    finally:
        if owned:
            f.close()
    return len(labels)

"""Discrete-time Topp glucose/insulin/beta-cell map toolkit.

Core surface: parameter/state types and the one-step map (:mod:`.model`),
fixed points and stability (:mod:`.stability`), orbits, convergence, periods
and basins (:mod:`.dynamics`), seeded verification suites (:mod:`.verify`),
bundled scenarios (:mod:`.repro`) and the ``toppmap`` CLI (:mod:`.cli`).

Hot loops run on a compiled extension when built, with a pure-Python
fallback selected at import; see :mod:`.kernels`.
"""

from .kernels import BACKEND
from .model import (
    CriticalExtras,
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
    in_omega1,
    in_omega2,
    params_from_dict,
    params_to_dict,
    step,
    step_many,
    u1_point,
    u2_point,
)
from .stability import (
    FixedPoint,
    QuadraticCase,
    QuadraticRootCase,
    StabilityClass,
    StabilityKind,
    build_report,
    char_quadratic_u2,
    classify_fixed_point,
    classify_quadratic,
    eigenvalues_numeric,
    eigenvalues_u1,
    fixed_points,
    jacobian,
    quadratic_roots,
)
from .dynamics import (
    AxisSpec,
    BasinLabel,
    ConvergenceResult,
    GridSpec,
    Trajectory,
    Verdict,
    check_monotone_z,
    classify_basin,
    detect_period,
    iterate,
    run_to_convergence,
    sweep_grid,
    write_basin_csv,
    write_trajectory_csv,
)
from .repro import FIG1_PARAMS, FIG2_PARAMS, INITIAL_POINTS, run_repro

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # model
    "CriticalExtras", "DomainBounds", "DomainFault", "ModelParams",
    "PreconditionFault", "Regime", "RegimeKind", "State",
    "classify_regime", "domain_bounds", "in_omega", "in_omega1", "in_omega2",
    "params_from_dict", "params_to_dict", "step", "step_many",
    "u1_point", "u2_point",
    # stability
    "FixedPoint", "QuadraticCase", "QuadraticRootCase", "StabilityClass",
    "StabilityKind", "build_report", "char_quadratic_u2",
    "classify_fixed_point", "classify_quadratic", "eigenvalues_numeric",
    "eigenvalues_u1", "fixed_points", "jacobian", "quadratic_roots",
    # dynamics
    "AxisSpec", "BasinLabel", "ConvergenceResult", "GridSpec", "Trajectory",
    "Verdict", "check_monotone_z", "classify_basin", "detect_period",
    "iterate", "run_to_convergence", "sweep_grid", "write_basin_csv",
    "write_trajectory_csv",
    # scenarios
    "FIG1_PARAMS", "FIG2_PARAMS", "INITIAL_POINTS", "run_repro",
]

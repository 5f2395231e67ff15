"""The two bundled experiments.

Both use the same constants except for the beta-cell death rate: scenario
``fig1`` sits strictly inside the subcritical regime (one attracting fixed
point), ``fig2`` sits exactly at the critical tangency (two fixed points,
basin split).  Parameters are compiled in and echoed into every summary.
"""

from __future__ import annotations

from pathlib import Path

from .dynamics import iterate, run_to_convergence, write_trajectory_csv
from .model import ModelParams, State
from .stability import dumps_17g, fixed_points

__all__ = ["FIG1_PARAMS", "FIG2_PARAMS", "INITIAL_POINTS", "SCENARIOS",
           "run_repro"]

FIG1_PARAMS = ModelParams(g0=0.1, g1=0.15, c=0.6, s1=1.0, s2=0.2, k=0.1,
                          d0=0.4, r1=1.0, r2=1.0)
FIG2_PARAMS = ModelParams(g0=0.1, g1=0.15, c=0.6, s1=1.0, s2=0.2, k=0.1,
                          d0=0.25, r1=1.0, r2=1.0)
INITIAL_POINTS = (State(0.5, 0.3, 0.016), State(0.5, 0.18, 0.016))

#: scenario -> (params, [(initial, expected target, tol, max_iter), ...])
SCENARIOS = {
    "fig1": (FIG1_PARAMS, [
        (INITIAL_POINTS[0], "u1", 1e-6, 10**4),
        (INITIAL_POINTS[1], "u1", 1e-6, 10**4),
    ]),
    "fig2": (FIG2_PARAMS, [
        (INITIAL_POINTS[0], "u1", 1e-6, 10**6),
        (INITIAL_POINTS[1], "u2", 1e-4, 10**6),
    ]),
}


def _auto_stride(steps: int) -> int:
    return max(1, steps // 10_000)


def run_repro(which: str, out_dir, stride: int | None = None) -> dict:
    """Run one scenario, write one CSV per orbit plus a JSON summary.

    The summary records the built-in parameters, the fixed points, and per
    orbit the expected and reached targets; ``ok`` is True iff every orbit
    converged to its expected fixed point within tolerance.
    """
    if which not in SCENARIOS:
        raise ValueError(f"unknown scenario {which!r}; pick one of "
                         f"{', '.join(sorted(SCENARIOS))}")
    params, orbit_specs = SCENARIOS[which]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fps = fixed_points(params)
    summary: dict = {
        "which": which,
        "params": {key: getattr(params, key) for key in
                   ("g0", "g1", "c", "s1", "s2", "k", "d0", "r1", "r2")},
        "fixed_points": [
            {"label": fp.label, "location": list(fp.location),
             "biological_label": fp.biological_label,
             "stability": fp.stability.kind.value}
            for fp in fps
        ],
        "orbits": [],
    }
    ok = True
    for i, (initial, expected, tol, max_iter) in enumerate(orbit_specs, start=1):
        result = run_to_convergence(params, initial, tol=tol, max_iter=max_iter)
        converged_to_expected = (result.verdict.value == "Converged"
                                 and result.target == expected)
        ok = ok and converged_to_expected
        steps = result.iterations
        orbit_stride = stride if stride is not None else _auto_stride(steps)
        traj = iterate(params, initial, steps)
        csv_name = f"{which}_orbit{i}.csv"
        rows = write_trajectory_csv(traj, out_dir / csv_name, stride=orbit_stride)
        summary["orbits"].append({
            "initial": list(initial),
            "csv": csv_name,
            "expected_target": expected,
            "tolerance": tol,
            "max_iterations": max_iter,
            "verdict": result.verdict.value,
            "reached_target": result.target,
            "iterations": result.iterations,
            "achieved_residual": result.achieved_residual,
            "final_state": [float(v) for v in traj.states[-1]],
            "stride": orbit_stride,
            "rows": rows,
            "ok": converged_to_expected,
        })
    summary["ok"] = ok
    summary_path = out_dir / f"{which}_summary.json"
    summary_path.write_text(dumps_17g(summary) + "\n", encoding="utf-8")
    return summary

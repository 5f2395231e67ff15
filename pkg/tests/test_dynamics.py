"""Orbits, convergence, periods, basins, CSV contracts."""

import io
import math

import numpy as np
import pytest

from helpers import sup
from toppmap.dynamics import (
    BASIN_HEADER,
    TRAJECTORY_HEADER,
    AxisSpec,
    GridSpec,
    Verdict,
    basin_counts,
    check_monotone_z,
    classify_basin,
    detect_period,
    iterate,
    run_to_convergence,
    sweep_grid,
    write_basin_csv,
    write_trajectory_csv,
)
from toppmap.model import (
    DomainFault,
    ModelParams,
    PreconditionFault,
    State,
    params_to_dict,
    step,
    u2_point,
)


class TestIterate:
    def test_fixed_point_orbit_is_constant(self, fig1_params):
        u = State(2 / 3, 0.0, 0.0)
        traj = iterate(fig1_params, u, 10)
        assert len(traj) == 11
        assert (traj.states == np.array(u)).all()
        assert traj.omega_exit is None
        assert traj.in_omega.all() and traj.in_omega1.all()

    def test_first_step_matches_scalar(self, fig1_params):
        traj = iterate(fig1_params, State(0.5, 0.3, 0.016), 1)
        assert traj.state(1) == step(fig1_params, State(0.5, 0.3, 0.016))

    def test_reiteration_is_bit_reproducible(self, fig2_params):
        s0 = State(0.5, 0.18, 0.016)
        traj = iterate(fig2_params, s0, 500)
        again = iterate(fig2_params, s0, 500)
        assert (traj.states == again.states).all()
        for i in (0, 17, 250, 499):
            assert step(fig2_params, traj.state(i)) == traj.state(i + 1)

    def test_omega_flags_and_exit(self, fig1_params):
        # x < g0 is outside Omega from the start; the orbit is still computed
        traj = iterate(fig1_params, State(0.05, 0.0, 0.0), 5)
        assert traj.omega_exit == 0
        assert not traj.in_omega[0]
        assert traj.in_omega[-1]  # the affine x-iteration pulls x above g0

    def test_fig2_z_stays_above_zstar(self, fig2_params):
        traj = iterate(fig2_params, State(0.5, 0.18, 0.016), 2000)
        zstar = u2_point(fig2_params).z
        assert (traj.states[:, 2] > zstar).all()
        assert not traj.in_omega2.any()
        assert traj.in_omega1.all()

    def test_omega2_flags_inside(self, fig2_params):
        traj = iterate(fig2_params, State(0.5, 0.18, 0.014), 50)
        assert traj.in_omega2.all()  # Omega_2 is invariant

    def test_negative_n_rejected(self, fig1_params):
        with pytest.raises(PreconditionFault):
            iterate(fig1_params, State(0.5, 0.3, 0.016), -1)

    def test_inadmissible_needs_opt_in(self, fig1_params):
        p = ModelParams(**{**params_to_dict(fig1_params), "d0": 0.1})
        with pytest.raises(PreconditionFault):
            iterate(p, State(0.5, 0.3, 0.016), 5)
        traj = iterate(p, State(0.5, 0.3, 0.016), 5, allow_inadmissible=True)
        assert not traj.in_omega.any()
        assert traj.omega_exit is None

    def test_octant_exit_is_domain_fault(self, fig1_params):
        with pytest.raises(DomainFault):
            iterate(fig1_params, State(1.0, 50.0, 0.0), 3)


class TestRunToConvergence:
    def test_fig1_to_u1(self, fig1_params):
        res = run_to_convergence(fig1_params, State(0.5, 0.3, 0.016),
                                 tol=1e-8, max_iter=10**4)
        assert res.verdict is Verdict.CONVERGED
        assert res.target == "u1"
        assert res.achieved_residual <= 1e-8
        assert sup(res.limit, (2 / 3, 0, 0)) < 1e-15

    def test_fig2_split(self, fig2_params):
        to_u1 = run_to_convergence(fig2_params, State(0.5, 0.3, 0.016), tol=1e-6)
        assert (to_u1.verdict, to_u1.target) == (Verdict.CONVERGED, "u1")
        to_u2 = run_to_convergence(fig2_params, State(0.5, 0.18, 0.016), tol=1e-4)
        assert (to_u2.verdict, to_u2.target) == (Verdict.CONVERGED, "u2")
        assert sup(to_u2.limit, (0.5, 1 / 12, 3 / 200)) < 1e-15

    def test_start_at_fixed_point(self, fig1_params):
        res = run_to_convergence(fig1_params, State(2 / 3, 0.0, 0.0), tol=1e-10)
        assert res.verdict is Verdict.CONVERGED
        assert res.iterations == 0

    def test_max_iterations_verdict(self, fig2_params):
        res = run_to_convergence(fig2_params, State(0.5, 0.18, 0.016),
                                 tol=1e-4, max_iter=10)
        assert res.verdict is Verdict.MAX_ITERATIONS
        assert res.limit is None and res.target is None
        assert res.iterations == 10
        assert math.isfinite(res.achieved_residual)

    def test_bad_arguments(self, fig1_params):
        with pytest.raises(PreconditionFault):
            run_to_convergence(fig1_params, State(0.5, 0.3, 0.016), tol=-1.0)
        with pytest.raises(PreconditionFault):
            run_to_convergence(fig1_params, State(0.5, 0.3, 0.016), max_iter=0)


class TestDetectPeriod:
    def test_fixed_point_has_period_one(self, fig1_params):
        assert detect_period(fig1_params, State(2 / 3, 0.0, 0.0), pmax=8) == 1

    def test_generic_orbit_has_none(self, fig1_params):
        s0 = State(0.5, 0.3, 0.016)
        assert detect_period(fig1_params, s0, pmax=64, tol=1e-10, burn_in=0) is None
        assert detect_period(fig1_params, s0, pmax=64, tol=1e-10, burn_in=100) is None

    def test_random_in_region_states(self, fig2_params):
        rng = np.random.default_rng(8)
        for _ in range(50):
            s0 = rng.uniform([0.1, 0, 0], [1.5, 1.41, 0.14], 3)
            p = detect_period(fig2_params, s0, pmax=64, tol=1e-10)
            assert p is None or p == 1

    def test_validation(self, fig1_params):
        with pytest.raises(PreconditionFault):
            detect_period(fig1_params, State(0.5, 0.3, 0.016), pmax=0)
        with pytest.raises(PreconditionFault):
            detect_period(fig1_params, State(0.5, 0.3, 0.016), pmax=4, burn_in=-1)


class TestClassifyBasin:
    def test_fig2_examples(self, fig2_params):
        a = classify_basin(fig2_params, State(0.5, 0.3, 0.016))
        assert a.label == "u1"
        b = classify_basin(fig2_params, State(0.5, 0.18, 0.016))
        assert b.label == "u2"
        assert b.z_hypothesis  # z(n) > z* along the whole orbit
        assert not b.x_hypothesis  # x(0) = 0.5 < g0/g1

    def test_subcritical_always_u1(self, fig1_params):
        rng = np.random.default_rng(13)
        for _ in range(10):
            s0 = rng.uniform([0.1, 0, 0], [1.42, 1.41, 0.14], 3)
            assert classify_basin(fig1_params, s0).label == "u1"

    def test_undecided_on_tiny_budget(self, fig2_params):
        rec = classify_basin(fig2_params, State(0.5, 0.18, 0.016), max_iter=5)
        assert rec.label == "undecided"

    def test_omega2_goes_to_u1(self, fig2_params):
        rng = np.random.default_rng(14)
        zstar = u2_point(fig2_params).z
        gx = fig2_params.g0 / fig2_params.g1
        for _ in range(10):
            s0 = rng.uniform([0.1, 0, 0], [gx, 1.41, zstar], 3)
            assert classify_basin(fig2_params, s0).label == "u1"


class TestMonotoneZ:
    def test_fig1_orbit(self, fig1_params):
        traj = iterate(fig1_params, State(0.5, 0.3, 0.016), 1000)
        assert check_monotone_z(traj) == (True, None)

    def test_fig2_orbit(self, fig2_params):
        traj = iterate(fig2_params, State(0.5, 0.18, 0.016), 1000)
        assert check_monotone_z(traj) == (True, None)

    def test_zero_z(self, fig1_params):
        traj = iterate(fig1_params, State(0.5, 0.3, 0.0), 100)
        assert check_monotone_z(traj) == (True, None)

    def test_violation_reported(self, fig1_params):
        # inadmissible: z grows near x = 0.5 when d0 is small
        p = ModelParams(**{**params_to_dict(fig1_params), "d0": 0.1})
        traj = iterate(p, State(0.5, 0.0, 0.01), 10, allow_inadmissible=True)
        ok, idx = check_monotone_z(traj)
        assert not ok and idx == 0


class TestBounds:
    """Orbit-wise inequality oracles from the convergence analysis."""

    def test_affine_axis_iteration_closed_form(self, fig1_params):
        p = fig1_params
        x0 = 0.37
        traj = iterate(p, State(x0, 0.0, 0.0), 100)
        q = 1 - p.g1
        for n in range(101):
            closed = p.g0 * (1 - q**n) / p.g1 + q**n * x0
            assert traj.states[n, 0] == pytest.approx(closed, rel=1e-12)

    def test_z_geometric_bound_subcritical(self, fig1_params):
        p = fig1_params
        traj = iterate(p, State(0.5, 0.3, 0.016), 500)
        factor = 1 + (p.r1**2 - 4 * p.r2 * p.d0) / (4 * p.r2)  # = 0.85
        bound = 0.016 * factor ** np.arange(501)
        assert (traj.states[:, 2] <= bound * (1 + 1e-12)).all()

    def test_x_closed_form_bound(self, fig1_params, fig2_params):
        for p in (fig1_params, fig2_params):
            for s0 in (State(0.5, 0.3, 0.016), State(0.5, 0.18, 0.016)):
                traj = iterate(p, s0, 500)
                q = (1 - p.g1) ** np.arange(501)
                bound = (p.g0 / p.g1) * (1 - q) + q * s0.x
                assert (traj.states[:, 0] <= bound * (1 + 1e-12)).all()


class TestSweepGrid:
    def test_row_major_and_all_u1(self, fig1_params):
        grid = GridSpec(AxisSpec(0.2, 1.2, 2), AxisSpec(0.0, 1.2, 2),
                        AxisSpec(0.0, 0.14, 2))
        labels = sweep_grid(fig1_params, grid, tol=1e-8)
        assert len(labels) == 8
        assert all(rec.label == "u1" for rec in labels)
        inits = [tuple(rec.initial) for rec in labels]
        assert inits == sorted(inits)  # row-major in (x, y, z)

    def test_single_point_grid_u2(self, fig2_params):
        grid = GridSpec(AxisSpec(0.5, 0.5, 1), AxisSpec(0.18, 0.18, 1),
                        AxisSpec(0.016, 0.016, 1))
        labels = sweep_grid(fig2_params, grid)
        assert len(labels) == 1
        assert labels[0].label == "u2"
        assert basin_counts(labels) == {"u1": 0, "u2": 1, "undecided": 0}

    def test_omega2_grid_all_u1(self, fig2_params):
        zstar = u2_point(fig2_params).z
        grid = GridSpec(AxisSpec(0.2, 0.6, 3), AxisSpec(0.0, 1.0, 3),
                        AxisSpec(0.0, 0.9 * zstar, 3))
        labels = sweep_grid(fig2_params, grid)
        assert len(labels) == 27
        assert all(rec.label == "u1" for rec in labels)

    def test_points_outside_omega_are_skipped(self, fig1_params):
        grid = GridSpec(AxisSpec(0.0, 1.2, 2), AxisSpec(0.0, 1.2, 2),
                        AxisSpec(0.0, 0.14, 2))  # x = 0 is below g0
        labels = sweep_grid(fig1_params, grid, tol=1e-8)
        assert len(labels) == 4

    def test_grid_spec_validation(self):
        with pytest.raises(ValueError):
            AxisSpec(1.0, 0.0, 2)
        with pytest.raises(ValueError):
            AxisSpec(0.0, 1.0, 0)
        with pytest.raises(ValueError):
            GridSpec.from_dict({"x": [0, 1, 2], "y": [0, 1, 2]})
        with pytest.raises(ValueError):
            GridSpec.from_dict({"x": [0, 1, 2], "y": [0, 1, 2],
                                "z": [0, 1, 2], "w": [0, 1, 2]})
        spec = GridSpec.from_dict({"x": [0, 1, 2], "y": [0, 1, 3], "z": [0, 0, 1]})
        assert spec.to_dict() == {"x": [0.0, 1.0, 2], "y": [0.0, 1.0, 3],
                                  "z": [0.0, 0.0, 1]}


class TestCsv:
    def test_trajectory_header_and_stride_rows(self, fig1_params):
        traj = iterate(fig1_params, State(0.5, 0.3, 0.016), 505)
        buf = io.StringIO()
        rows = write_trajectory_csv(traj, buf, stride=10)
        lines = buf.getvalue().splitlines()
        assert lines[0] == TRAJECTORY_HEADER
        assert rows == math.ceil(505 / 10) + 1 == 52
        assert len(lines) == 53
        assert lines[-1].startswith("505,")

    def test_trajectory_values_round_trip(self, fig2_params):
        traj = iterate(fig2_params, State(0.5, 0.18, 0.016), 40)
        buf = io.StringIO()
        write_trajectory_csv(traj, buf)
        for line in buf.getvalue().splitlines()[1:]:
            parts = line.split(",")
            n = int(parts[0])
            assert [float(v) for v in parts[1:4]] == list(traj.states[n])
            assert parts[4:] == [str(int(traj.in_omega[n])),
                                 str(int(traj.in_omega1[n])),
                                 str(int(traj.in_omega2[n]))]

    def test_trajectory_file_output_lf(self, fig1_params, tmp_path):
        traj = iterate(fig1_params, State(0.5, 0.3, 0.016), 10)
        dest = tmp_path / "orbit.csv"
        write_trajectory_csv(traj, dest)
        raw = dest.read_bytes()
        assert b"\r" not in raw
        assert raw.decode("utf-8").splitlines()[0] == TRAJECTORY_HEADER

    def test_basin_csv(self, fig2_params):
        labels = [classify_basin(fig2_params, State(0.5, 0.18, 0.016))]
        buf = io.StringIO()
        write_basin_csv(labels, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == BASIN_HEADER
        parts = lines[1].split(",")
        assert parts[0:3] == ["0.5", "0.18", "0.016"]
        assert parts[3] == "u2"
        assert parts[5:] == ["0", "1"]  # x_hyp false, z_hyp true

    def test_bad_stride(self, fig1_params):
        traj = iterate(fig1_params, State(0.5, 0.3, 0.016), 10)
        with pytest.raises(PreconditionFault):
            write_trajectory_csv(traj, io.StringIO(), stride=0)

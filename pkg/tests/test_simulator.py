import math
from dataclasses import replace

import pytest

from pipediff import (
    Bend,
    DisturbanceConfig,
    GearTrainConfig,
    InvalidScenarioError,
    PipeNetwork,
    PipeSpec,
    RobotConfig,
    SimParams,
    SimState,
    Straight,
    effective_robot_path,
    module_path_radius,
    run,
    run_orientation_sweep,
    step,
)

Z = (0.0, 0.0, 1.0)
X = (1.0, 0.0, 0.0)
Y = (0.0, 1.0, 0.0)


def small_setup(dt=0.01, theta_deg=0.0, **sim_overrides):
    """Straight + 90 deg elbow + straight, nominal speed 50 mm/s."""
    spec = PipeSpec(inner_radius=13.2)
    net = PipeNetwork(
        spec,
        (
            Straight(100.0, Z),
            Bend(radius=200.0, sweep_deg=90.0, normal=Y),
            Straight(80.0, X),
        ),
    )
    robot = RobotConfig(
        sprocket_radius=25.0,
        length=40.0,
        nominal_body_radius=13.2,
        preload_compression=5.0,
    )
    gear = GearTrainConfig(ratio=1.0)
    params = SimParams(omega_u=2.0, dt=dt, theta_deg=theta_deg, **sim_overrides)
    return net, robot, gear, params


class TestStep:
    def test_straight_advance(self):
        net, robot, gear, params = small_setup()
        state, record = step(SimState(), net, robot, gear, params)
        assert state.s == pytest.approx(0.5, rel=1e-12)  # 50 mm/s * 0.01 s
        assert state.t == pytest.approx(0.01)
        assert record.t == 0.0 and record.s == 0.0
        assert record.v == pytest.approx((50.0, 50.0, 50.0), rel=1e-12)

    def test_bend_advance_keeps_the_nominal_mean(self):
        net, robot, gear, params = small_setup()
        start = SimState(t=0.0, s=150.0)  # inside the elbow
        state, record = step(start, net, robot, gear, params)
        assert record.segment == 1
        assert state.s - start.s == pytest.approx(0.5, rel=1e-9)

    def test_completion_signal_at_network_end(self):
        net, robot, gear, params = small_setup()
        end = net.total_length
        state, record = step(SimState(t=1.0, s=end), net, robot, gear, params)
        assert state.done
        assert record.segment == len(net.segments) - 1
        with pytest.raises(ValueError):
            step(state, net, robot, gear, params)

    def test_past_end_is_rejected(self):
        net, robot, gear, params = small_setup()
        with pytest.raises(ValueError):
            step(SimState(s=net.total_length + 1.0), net, robot, gear, params)

    def test_disturbance_requires_generator(self):
        net, robot, gear, params = small_setup(
            disturbance=DisturbanceConfig(amplitude=0.01, seed=1)
        )
        with pytest.raises(ValueError):
            step(SimState(), net, robot, gear, params)


class TestRun:
    def test_records_step_by_dt_and_s_is_monotone(self):
        net, robot, gear, params = small_setup()
        records, summary = run(net, robot, gear, params)
        assert summary.completed
        times = [r.t for r in records]
        for a, b in zip(times, times[1:]):
            assert b - a == pytest.approx(params.dt, rel=1e-9)
        positions = [r.s for r in records]
        assert positions == sorted(positions)
        assert positions[-1] == net.total_length

    def test_mean_speed_conservation_in_straights_and_bends(self):
        net, robot, gear, params = small_setup()
        records, _ = run(net, robot, gear, params)
        nominal = gear.ratio * params.omega_u * robot.sprocket_radius
        for record in records:
            assert math.fsum(record.v) / 3.0 == pytest.approx(nominal, rel=1e-9)

    def test_zero_disturbance_has_zero_slip(self):
        net, robot, gear, params = small_setup()
        records, summary = run(net, robot, gear, params)
        assert summary.max_slip <= 1e-9

    def test_determinism_bit_identical(self):
        net, robot, gear, params = small_setup(
            disturbance=DisturbanceConfig(amplitude=0.025, seed=11)
        )
        first, _ = run(net, robot, gear, params)
        second, _ = run(net, robot, gear, params)
        assert first == second

    def test_distance_closure_over_the_bend(self):
        net, robot, gear, params = small_setup()
        records, _ = run(net, robot, gear, params)
        in_bend = [r for r in records if r.segment == 1]
        after = [r for r in records if r.segment == 2]
        bend = net.segments[1]
        sweep = bend.sweep_rad
        nominal = gear.ratio * params.omega_u * robot.sprocket_radius
        tol = 3.0 * nominal * params.dt
        for i in range(3):
            rho = module_path_radius(bend, params.theta_rad, i, net.spec.inner_radius)
            travelled = after[0].distance[i] - in_bend[0].distance[i]
            assert travelled == pytest.approx(rho * sweep, abs=tol)

    def test_time_step_convergence(self):
        net, robot, gear, params = small_setup(dt=0.01)
        _, coarse = run(net, robot, gear, params)
        _, fine = run(net, robot, gear, replace(params, dt=0.005))
        assert abs(fine.total_time - coarse.total_time) / coarse.total_time < 0.005

    def test_t_max_stops_the_run(self):
        net, robot, gear, params = small_setup(t_max=1.0)
        records, summary = run(net, robot, gear, params)
        assert not summary.completed
        assert summary.stop_reason == "t_max"
        assert records[-1].t == pytest.approx(1.0)

    def test_no_fit_mid_run_keeps_partial_trace(self):
        net, robot, gear, params = small_setup()
        tight = replace(robot, length=120.0, max_tilt_deg=45.0)  # 9 mm sagitta at R=200
        tighter = replace(tight, max_compression=12.0)
        records, summary = run(net, tighter, gear, params)
        assert not summary.completed
        assert summary.error is not None and "compression" in summary.error
        assert records  # the straight section was traversed
        assert all(r.segment == 0 for r in records)

    def test_invalid_network_is_rejected(self):
        spec = PipeSpec(inner_radius=13.2)
        net = PipeNetwork(spec, (Bend(radius=5.0, sweep_deg=90.0, normal=Y),))
        _, robot, gear, params = small_setup()
        with pytest.raises(InvalidScenarioError):
            run(net, robot, gear, params)

    def test_nonpositive_nominal_speed_is_rejected(self):
        net, robot, gear, _ = small_setup()
        with pytest.raises(InvalidScenarioError):
            run(net, robot, gear, SimParams(omega_u=-2.0))

    def test_segment_summaries_cover_entry_and_exit(self):
        net, robot, gear, params = small_setup()
        _, summary = run(net, robot, gear, params)
        assert [s.index for s in summary.segments] == [0, 1, 2]
        first, elbow, last = summary.segments
        assert first.entry_time == 0.0
        assert elbow.entry_time == pytest.approx(100.0 / 50.0, abs=2 * params.dt)
        assert elbow.exit_time == pytest.approx(
            (100.0 + 100.0 * math.pi) / 50.0, abs=2 * params.dt
        )
        assert last.exit_time == summary.total_time


class TestEffectiveRobotPath:
    def test_difference(self):
        net, robot, _, _ = small_setup()
        robot = replace(robot, length=200.0)
        assert effective_robot_path(net, robot) == pytest.approx(
            net.total_length - 200.0
        )

    def test_single_straight(self):
        spec = PipeSpec(inner_radius=13.2)
        net = PipeNetwork(spec, (Straight(350.0, Z),))
        robot = RobotConfig(
            sprocket_radius=25.0, length=200.0,
            nominal_body_radius=13.2, preload_compression=5.0,
        )
        assert effective_robot_path(net, robot) == pytest.approx(150.0)

    def test_network_shorter_than_robot(self):
        spec = PipeSpec(inner_radius=13.2)
        net = PipeNetwork(spec, (Straight(100.0, Z),))
        robot = RobotConfig(
            sprocket_radius=25.0, length=200.0,
            nominal_body_radius=13.2, preload_compression=5.0,
        )
        with pytest.raises(InvalidScenarioError):
            effective_robot_path(net, robot)


class TestOrientationSweep:
    def test_mean_speed_is_orientation_independent(self):
        net, robot, gear, params = small_setup()
        nominal = gear.ratio * params.omega_u * robot.sprocket_radius
        results = run_orientation_sweep(net, robot, gear, params, steps=4)
        assert [theta for theta, _, _ in results] == [0.0, 90.0, 180.0, 270.0]
        for _theta, records, summary in results:
            assert summary.completed
            for record in records:
                assert math.fsum(record.v) / 3.0 == pytest.approx(nominal, rel=1e-9)

    def test_per_orientation_seeds_differ(self):
        net, robot, gear, params = small_setup(
            disturbance=DisturbanceConfig(amplitude=0.02, seed=5)
        )
        results = run_orientation_sweep(net, robot, gear, params, steps=2)
        seeds = [summary.disturbance_seed for _, _, summary in results]
        assert seeds == [5, 6]

    def test_rejects_zero_steps(self):
        net, robot, gear, params = small_setup()
        with pytest.raises(ValueError):
            run_orientation_sweep(net, robot, gear, params, steps=0)


def test_sim_params_validation():
    with pytest.raises(ValueError):
        SimParams(omega_u=1.0, dt=0.0)
    with pytest.raises(ValueError):
        SimParams(omega_u=1.0, t_max=-1.0)
    with pytest.raises(ValueError):
        DisturbanceConfig(amplitude=1.5)
    assert SimParams(omega_u=1.0, theta_deg=120.0).theta_rad == pytest.approx(
        2.0 * math.pi / 3.0
    )

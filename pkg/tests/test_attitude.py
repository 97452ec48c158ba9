import numpy as np

from thrustwalk.attitude import (
    AttitudeGains,
    ThrustAllocator,
    allocate_thrusts,
    attitude_wrench,
    moment_map,
)
from thrustwalk.dynamics import ModelParams, thruster_wrench, RobotState


def test_zero_error_zero_rate_gives_zero_moment():
    g = AttitudeGains()
    ref = np.array([0.1, -0.2, 0.0])
    assert np.allclose(attitude_wrench(ref, np.zeros(3), ref, g), 0.0)


def test_roll_error_proportional_moment():
    g = AttitudeGains(kp=np.array([50.0, 50.0, 0.0]), kd=np.zeros(3))
    m = attitude_wrench(np.array([-0.1, 0.0, 0.0]), np.zeros(3), np.zeros(3), g)
    assert abs(m[0] - 5.0) < 1e-12


def test_rate_term_damps():
    g = AttitudeGains(kp=np.zeros(3), kd=np.array([5.0, 5.0, 0.0]))
    m = attitude_wrench(np.zeros(3), np.array([1.0, 0.0, 0.0]), np.zeros(3), g)
    assert abs(m[0] + 5.0) < 1e-12


def test_zero_demand_zero_thrusts():
    f, residual = allocate_thrusts(np.zeros(3), ModelParams())
    assert np.allclose(f, 0.0)
    assert residual == 0.0


def test_pure_roll_matches_least_squares_oracle():
    model = ModelParams()
    demand = np.array([1.2, 0.0, 0.0])
    A = moment_map(model)
    unclamped, *_ = np.linalg.lstsq(A, demand, rcond=None)
    left = model.thruster_offsets[:, 1] > 0
    assert np.all(unclamped[left] > 0.0) and np.all(unclamped[~left] < 0.0)
    assert np.allclose(np.abs(unclamped), np.abs(unclamped[0]))
    f, _ = allocate_thrusts(demand, model)
    assert np.allclose(f, np.clip(unclamped, 0.0, model.max_thrust), atol=1e-12)


def test_saturation_clamps_to_edf_limit():
    model = ModelParams()
    f, _ = allocate_thrusts(np.array([500.0, 300.0, 0.0]), model)
    assert np.all(f <= 19.62 + 1e-12) and np.all(f >= 0.0)


def test_thrusts_always_within_bounds(rng):
    model = ModelParams()
    alloc = ThrustAllocator(model)
    for _ in range(200):
        f, _ = alloc(rng.normal(scale=20.0, size=3))
        assert np.all(f >= 0.0) and np.all(f <= model.max_thrust + 1e-12)


def test_feasible_demand_reproduced_exactly(rng):
    # demands whose unclamped least-squares solution is feasible are delivered
    # exactly through the thruster wrench
    model = ModelParams()
    A = moment_map(model)
    pinv = np.linalg.pinv(A)
    state = RobotState.standing()
    found = 0
    for _ in range(500):
        demand = rng.normal(scale=1.0, size=3)
        demand[2] = 0.0
        f = pinv @ demand
        if np.all(f >= 0.0) and np.all(f <= model.max_thrust):
            clamped, _ = allocate_thrusts(demand, model)
            w = thruster_wrench(clamped, state, model)
            assert np.allclose(w.moment[0:2], demand[0:2], atol=1e-10)
            found += 1
    # min-norm solutions are zero-sum, so only the zero demand is feasible;
    # the check above must at least cover near-zero demands
    zero, _ = allocate_thrusts(np.zeros(3), model)
    w = thruster_wrench(zero, state, model)
    assert np.allclose(w.moment, 0.0)


def test_yaw_demand_reported_not_actuated():
    model = ModelParams()
    f, residual = allocate_thrusts(np.array([0.0, 0.0, 3.0]), model)
    assert np.allclose(f, 0.0, atol=1e-12)
    assert residual == 3.0

import numpy as np

from thrustwalk.dynamics import (
    LegId,
    ModelParams,
    RobotState,
    bias_vector,
    foot_velocity_jacobian,
    mass_matrix,
)
from thrustwalk.estimation import (
    constrained_grf,
    make_observer,
    numeric_mass_matrix_rate,
    observer_step,
    per_foot_forces,
)


def _standing(height=0.3):
    return RobotState.standing(body_height=height)


# --- numeric mass matrix rate -----------------------------------------------------

def test_rate_zero_for_constant_matrix():
    M = mass_matrix(ModelParams())
    assert np.allclose(numeric_mass_matrix_rate(M, M, 5e-4), 0.0)


def test_rate_linearity():
    M = mass_matrix(ModelParams())
    D = np.arange(36.0).reshape(6, 6)
    T_s = 2e-3
    assert np.allclose(numeric_mass_matrix_rate(M + T_s * D, M, T_s), D, atol=1e-10)


def _pendulum_mass(q2, m1=1.0, m2=1.5, l1=0.8, l2=0.5):
    """Two-link pendulum mass matrix: the classic configuration-dependent case."""
    a = m1 * l1**2 + m2 * (l1**2 + 2 * l1 * l2 * np.cos(q2) + l2**2)
    b = m2 * (l1 * l2 * np.cos(q2) + l2**2)
    c = m2 * l2**2
    return np.array([[a, b], [b, c]])


def _pendulum_mass_rate(q2, dq2, m1=1.0, m2=1.5, l1=0.8, l2=0.5):
    da = -2 * m2 * l1 * l2 * np.sin(q2) * dq2
    db = -m2 * l1 * l2 * np.sin(q2) * dq2
    return np.array([[da, db], [db, 0.0]])


def test_rate_on_two_link_pendulum_first_order_accurate():
    q2, dq2 = 0.7, 1.3
    errs = []
    for T_s in (1e-3, 5e-4):
        M_k = _pendulum_mass(q2)
        M_km1 = _pendulum_mass(q2 - dq2 * T_s)
        err = np.max(np.abs(numeric_mass_matrix_rate(M_k, M_km1, T_s) - _pendulum_mass_rate(q2, dq2)))
        errs.append(err)
    assert errs[0] < 0.01  # O(T_s) magnitude
    assert 1.5 < errs[0] / errs[1] < 2.5  # halving T_s roughly halves the error


# --- momentum observer ---------------------------------------------------------------

def test_observer_zero_residual_without_external_force():
    model = ModelParams()
    M = mass_matrix(model)
    M_inv = np.linalg.inv(M)
    dt = 5e-4
    v = np.array([0.1, -0.2, 0.3, 0.0, 0.0, 0.0])
    obs = make_observer(1000.0, v, M, dt)
    for _ in range(400):
        # free fall: dv = g rows only; h explains all of it
        s = RobotState.standing()
        s.twist.linear, s.twist.angular = v[0:3], v[3:6]
        h = bias_vector(s, model)
        v = v + M_inv @ (-h) * dt
        obs = observer_step(obs, v, np.zeros(6), h, M, dt)
        assert np.all(np.abs(obs.r) < 1e-9)


def test_observer_constant_force_convergence_rate():
    # r(t) = F (1 - exp(-K t)); at t = 10 ms with K = 1000 the relative error
    # bound is exp(-10) ~ 4.5e-5
    F = np.array([3.0, -2.0, 5.0, 0.4, -0.1, 0.2])
    model = ModelParams()
    M = mass_matrix(model)
    M_inv = np.linalg.inv(M)
    dt = 5e-4
    v = np.zeros(6)
    obs = make_observer(1000.0, v, M, dt)
    h = np.zeros(6)  # gravity-free test plant
    for _ in range(20):
        v = v + M_inv @ F * dt
        obs = observer_step(obs, v, np.zeros(6), h, M, dt)
    assert np.all(np.abs(obs.r - F) / np.abs(F) < 1e-4)


def test_observer_sinusoid_frequency_response():
    # steady-state amplitude ratio of the first-order filter: K / sqrt(K^2 + w^2)
    K, omega, dt = 1000.0, 200.0, 5e-4
    model = ModelParams()
    M = mass_matrix(model)
    M_inv = np.linalg.inv(M)
    v = np.zeros(6)
    obs = make_observer(K, v, M, dt)
    amp = np.zeros(6)
    t = 0.0
    hist = []
    n = int(round(1.0 / dt))
    for k in range(n):
        F = np.sin(omega * (t + 0.5 * dt)) * np.array([4.0, 0, 0, 0.5, 0, 0])
        v = v + M_inv @ F * dt  # midpoint rule keeps the plant integration honest
        t += dt
        obs = observer_step(obs, v, np.zeros(6), np.zeros(6), M, dt)
        if t > 0.5:
            hist.append(obs.r[0])
    measured = 0.5 * (np.max(hist) - np.min(hist))
    expected = 4.0 * K / np.hypot(K, omega)
    assert abs(measured - expected) / expected < 0.02


def test_observer_input_channel_invariance():
    # a force fed through the input channel is explained away: the residual
    # only sees unmodeled forces
    F_known = np.array([2.0, 1.0, -3.0, 0.1, 0.2, -0.1])
    F_unknown = np.array([1.0, -1.5, 2.0, 0.0, 0.3, 0.05])
    model = ModelParams()
    M = mass_matrix(model)
    M_inv = np.linalg.inv(M)
    dt = 5e-4
    v = np.zeros(6)
    obs = make_observer(1000.0, v, M, dt)
    for _ in range(100):
        v = v + M_inv @ (F_known + F_unknown) * dt
        obs = observer_step(obs, v, F_known, np.zeros(6), M, dt)
    assert np.allclose(obs.r, F_unknown, atol=1e-4 * np.linalg.norm(F_unknown))


# --- per-foot recovery ----------------------------------------------------------------

def test_single_foot_exact_recovery(rng):
    model = ModelParams()
    s = _standing()
    B = foot_velocity_jacobian(s, model, LegId.FR)
    f = rng.normal(scale=20.0, size=3)
    r = B.T @ f
    out = per_foot_forces(r, [B])
    assert np.allclose(out[0], f, atol=1e-8)


def test_two_feet_minimum_norm_reconstruction(rng):
    model = ModelParams()
    s = _standing()
    B1 = foot_velocity_jacobian(s, model, LegId.FR)
    B2 = foot_velocity_jacobian(s, model, LegId.BL)
    f1, f2 = rng.normal(scale=15.0, size=3), rng.normal(scale=15.0, size=3)
    r = B1.T @ f1 + B2.T @ f2
    out = per_foot_forces(r, [B1, B2])
    recon = B1.T @ out[0] + B2.T @ out[1]
    assert np.allclose(recon, r, atol=1e-8)
    # minimum-norm: no component along the unobservable internal squeeze
    d = (s.pose.position + model.hip_offsets[0]) - (s.pose.position + model.hip_offsets[3])
    squeeze = np.concatenate([d, -d]) / np.sqrt(2) / np.linalg.norm(d)
    assert abs(out.reshape(-1) @ squeeze) < 1e-8


def test_zero_residual_zero_forces():
    model = ModelParams()
    B = foot_velocity_jacobian(_standing(), model, LegId.FL)
    assert np.allclose(per_foot_forces(np.zeros(6), [B]), 0.0)


def test_no_stance_feet_empty():
    assert per_foot_forces(np.ones(6), []).shape == (0, 3)


# --- constrained model ---------------------------------------------------------------

def test_constrained_static_four_feet_weight_share():
    model = ModelParams()
    s = _standing()
    M = mass_matrix(model)
    h = bias_vector(s, model)
    jacs = [foot_velocity_jacobian(s, model, leg) for leg in LegId]
    out = constrained_grf(s, np.zeros(6), h, M, jacs)
    assert np.allclose(out.forces[:, 2], model.weight / 4.0, atol=1e-9)
    assert np.allclose(out.forces[:, 2], 19.62, atol=1e-9)


def test_constrained_airborne_empty():
    s = _standing(2.0)
    out = constrained_grf(s, np.zeros(6), np.zeros(6), mass_matrix(ModelParams()), [])
    assert out.empty


def test_constrained_single_contact_equals_direct_inverse():
    model = ModelParams()
    s = _standing()
    s.twist.linear = np.array([0.1, 0.0, -0.05])
    s.twist.angular = np.array([0.2, -0.1, 0.05])
    M = mass_matrix(model)
    h = bias_vector(s, model)
    B = foot_velocity_jacobian(s, model, LegId.FR)
    Bdot = np.random.default_rng(3).normal(scale=0.1, size=(3, 6))
    out = constrained_grf(s, np.zeros(6), h, M, [B], [Bdot])
    D = B @ np.linalg.inv(M) @ B.T
    v = s.twist.as_vector()
    direct = np.linalg.solve(D, B @ np.linalg.inv(M) @ h - Bdot @ v)
    assert np.allclose(out.forces[0], direct, atol=1e-10)
    assert out.rank == 3


def test_constrained_two_point_rank_deficiency_recorded():
    model = ModelParams()
    s = _standing()
    M = mass_matrix(model)
    h = bias_vector(s, model)
    jacs = [foot_velocity_jacobian(s, model, leg) for leg in (LegId.FR, LegId.BL)]
    out = constrained_grf(s, np.zeros(6), h, M, jacs)
    assert out.rank == 5  # Delassus matrix loses the internal-squeeze direction
    assert out.singular_values.shape == (6,)


def test_constrained_vertical_thrust_reduces_normals():
    model = ModelParams()
    s = _standing()
    M = mass_matrix(model)
    h = bias_vector(s, model)
    jacs = [foot_velocity_jacobian(s, model, leg) for leg in LegId]
    u_t = np.array([0.0, 0.0, 0.5 * model.weight, 0.0, 0.0, 0.0])
    out = constrained_grf(s, u_t, h, M, jacs)
    assert np.allclose(out.forces[:, 2], model.weight / 8.0, atol=1e-9)

"""Closed-loop scenario execution.

Per control tick (one fixed integration step, controls zero-order held):
  1. the reference governor predicts stance forces and filters the applied
     velocity reference,
  2. the gait planner emits joint references and acceleration inputs,
  3. the attitude PD allocates fan thrusts,
  4. the plant advances one RK4 step (contact forces are re-evaluated from
     the substep states inside the derivative; the rotation is re-projected
     onto SO(3) afterwards),
  5. both estimators update from states and inputs only -- the true contact
     forces are computed for logging and metrics but never cross into the
     estimator interfaces,
  6. a telemetry row is recorded at the decimation interval.

Faults (non-finite state, Euler singularity, body below ground) terminate
the run with a partial log and a fault record instead of raising.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import asin, atan2, cos, sin, tan
from pathlib import Path

import numpy as np

from .attitude import ThrustAllocator
from .config import SimConfig
from .dynamics import (
    NUM_LEGS,
    ModelParams,
    RobotState,
    Wrench,
    bias_vector,
    foot_jacobians,
    mass_matrix,
)
from .estimation import constrained_grf, make_observer, observer_step, per_foot_forces
from .gait import GaitPlanner, GaitSchedule
from .governor import ReferenceGovernor
from .integrator import renormalize_rotation, rk4_step
from .plant import Plant
from .so3 import EulerSingularityError
from .telemetry import N_COLUMNS, log_columns, write_csv

TRANSIENT_SKIP = 0.05  # estimator error metrics start after this many seconds


@dataclass
class FaultRecord:
    reason: str
    t: float


@dataclass
class _AttitudePath:
    """Scalar-speed constants for the per-tick attitude computation."""

    kp: list[float]
    kd: list[float]
    ref: list[float]
    alloc: list[list[float]]  # pseudo-inverse of the thrust-to-moment map, 4x3
    limit: float


def _attitude_control(x: np.ndarray, c: _AttitudePath) -> tuple[np.ndarray, list[float]]:
    """Euler extraction, PD moment demand, and clamped thrust allocation.

    Scalar twin of euler_zyx_from_matrix + euler_rates_from_omega +
    attitude_wrench + allocate_thrusts (an equivalence test pins them); runs
    on the flat state vector at the control rate.
    """
    s_pitch = -x[9]
    if abs(s_pitch) >= 1.0 - 1e-6:
        raise EulerSingularityError(f"pitch at +/-pi/2 (sin pitch = {s_pitch:.6f})")
    pitch = asin(s_pitch)
    roll = atan2(x[10], x[11])
    yaw = atan2(x[6], x[3])
    wx, wy, wz = x[15], x[16], x[17]
    sr, cr = sin(roll), cos(roll)
    tp = tan(pitch)
    roll_rate = wx + sr * tp * wy + cr * tp * wz
    pitch_rate = cr * wy - sr * wz
    yaw_rate = (sr * wy + cr * wz) / cos(pitch)
    d0 = c.kp[0] * (c.ref[0] - roll) - c.kd[0] * roll_rate
    d1 = c.kp[1] * (c.ref[1] - pitch) - c.kd[1] * pitch_rate
    d2 = c.kp[2] * (c.ref[2] - yaw) - c.kd[2] * yaw_rate
    thrusts = []
    for row in c.alloc:
        f = row[0] * d0 + row[1] * d1 + row[2] * d2
        thrusts.append(0.0 if f < 0.0 else (c.limit if f > c.limit else f))
    return np.array([roll, pitch, yaw]), thrusts


@dataclass
class ScenarioResult:
    config: SimConfig
    rows: list[np.ndarray]
    metrics: dict[str, float]
    fault: FaultRecord | None = None
    step_times: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def faulted(self) -> bool:
        return self.fault is not None

    def table(self) -> dict[str, np.ndarray]:
        data = np.asarray(self.rows, dtype=float).reshape(len(self.rows), N_COLUMNS)
        return {name: data[:, i] for i, name in enumerate(log_columns())}

    def write(self, path: str | Path) -> None:
        from . import __version__

        meta = {
            "format": "thrustwalk-log-v1",
            "version": __version__,
            "config_hash": self.config.config_hash(),
            "dt": repr(self.config.dt),
            "decimate": self.config.decimate,
        }
        if self.fault is not None:
            meta["fault"] = f"{self.fault.reason}@{self.fault.t!r}"
        write_csv(self.rows, path, meta)


def initial_state(config: SimConfig) -> RobotState:
    """Standing start: body level at leg length, four feet just touching."""
    h = config.ground.height + config.gait.standing_leg_length
    state = RobotState.standing(body_height=h, leg_length=config.gait.standing_leg_length)
    state.pose.position[2] = h
    return state


def run_scenario(
    config: SimConfig,
    out_path: str | Path | None = None,
    full_rate: bool = False,
    duration: float | None = None,
) -> ScenarioResult:
    """Run one scenario; returns metrics and the (decimated) telemetry rows."""
    config.validate()
    model: ModelParams = config.model
    ground = config.ground
    sched: GaitSchedule = config.gait.schedule
    dt = config.dt
    horizon = config.duration if duration is None else duration
    n_steps = int(round(horizon / dt))
    decimate = 1 if full_rate else config.decimate
    rng = np.random.default_rng(config.seed)
    noise_std = config.observer.velocity_noise_std

    state = initial_state(config)
    x = state.to_vector()

    planner = GaitPlanner(
        sched,
        model,
        config.gait.joint_gains,
        standing_leg_length=config.gait.standing_leg_length,
        velocity_gain=config.gait.velocity_gain,
        ground_height=ground.height,
    )
    planner.reset(state)
    governor = ReferenceGovernor(config.desired_velocity, config.constraint, config.erg)
    allocator = ThrustAllocator(model, config.attitude.max_thrust)
    M = mass_matrix(model)
    M_inv = np.linalg.inv(M)
    observer = make_observer(config.observer.gain, state.twist.as_vector(), M, dt)

    plant = Plant(model, ground)
    u_t = Wrench.zero("body")
    thrusts = np.zeros(NUM_LEGS)
    thr_y = model.thruster_offsets[:, 1].tolist()
    thr_x = (-model.thruster_offsets[:, 0]).tolist()
    paths = _AttitudePath(
        kp=np.asarray(config.attitude.kp, dtype=float).tolist(),
        kd=np.asarray(config.attitude.kd, dtype=float).tolist(),
        ref=np.asarray(config.euler_reference, dtype=float).tolist(),
        alloc=[[float(v) for v in row] for row in allocator.pinv],
        limit=float(config.attitude.max_thrust),
    )
    jac_prev = foot_jacobians(state, model)

    rows: list[np.ndarray] = []
    step_times = np.empty(n_steps)
    fault: FaultRecord | None = None
    p_start = state.pose.position.copy()

    # metric accumulators (full rate)
    min_margin = np.inf
    max_excess_x = -np.inf
    max_excess_y = -np.inf
    peak_normal_gen = 0.0
    sq_err_obs = 0.0
    sq_err_con = 0.0
    n_err = 0
    pred_normal_sum = 0.0
    stance_normal_sum = 0.0
    n_pred = 0

    t = 0.0
    k = -1
    for k in range(n_steps):
        tic = time.perf_counter()
        try:
            # --- control at the current state -------------------------------
            x_w, margin = governor.step(
                state, planner.current_stance_points(), u_t, model, dt
            )
            plan = planner.update(state, x_w, dt)
            euler, tl = _attitude_control(x, paths)
            thrusts = np.array(tl)
            total_thrust = tl[0] + tl[1] + tl[2] + tl[3]
            m_body = [
                thr_y[0] * tl[0] + thr_y[1] * tl[1] + thr_y[2] * tl[2] + thr_y[3] * tl[3],
                thr_x[0] * tl[0] + thr_x[1] * tl[1] + thr_x[2] * tl[2] + thr_x[3] * tl[3],
                0.0,
            ]
            u_t = Wrench(
                force=np.array([0.0, 0.0, total_thrust]),
                moment=np.array(m_body),
                frame="body",
            )
            # generalized convention: world-frame force rows, body-frame moments
            u_t_gen = np.array(
                [
                    x[5] * total_thrust,
                    x[8] * total_thrust,
                    x[11] * total_thrust,
                    m_body[0],
                    m_body[1],
                    m_body[2],
                ]
            )

            # --- plant -------------------------------------------------------
            x = renormalize_rotation(rk4_step(plant.make_f(u_t, plan.u_L), x, dt))
            if not np.all(np.isfinite(x)):
                raise FloatingPointError("non-finite state after integration")
            state = RobotState.from_vector(x, copy=False)  # x is replaced, never mutated
            t = (k + 1) * dt
            if state.pose.position[2] < ground.height:
                raise FloatingPointError("body below ground")

            # --- truth (logging/metrics only) and estimators ------------------
            grf, feet, true_gen = plant.truth(x)
            h_bias = bias_vector(state, model)
            v = state.twist.as_vector()
            if noise_std > 0.0:
                v = v + rng.normal(0.0, noise_std, 6)
            observer = observer_step(observer, v, u_t_gen, h_bias, M, dt)

            jacs = foot_jacobians(state, model)
            jac_rates = (jacs - jac_prev) / dt
            jac_prev = jacs
            stance_idx = np.flatnonzero(grf.in_contact)
            stance_jacs = [jacs[i] for i in stance_idx]
            con = constrained_grf(
                state, u_t_gen, h_bias, M, stance_jacs,
                [jac_rates[i] for i in stance_idx], M_inv=M_inv,
            )
        except EulerSingularityError as exc:
            fault = FaultRecord(f"euler singularity: {exc}", t)
            break
        except FloatingPointError as exc:
            fault = FaultRecord(str(exc), t)
            break

        step_times[k] = time.perf_counter() - tic

        # --- metrics ----------------------------------------------------------
        if margin < min_margin:
            min_margin = margin
        mu_s = ground.mu_static
        for i in stance_idx:
            gfx, gfy, gfz = grf.forces[i].tolist()
            ex = abs(gfx) - mu_s * gfz
            ey = abs(gfy) - mu_s * gfz
            if ex > max_excess_x:
                max_excess_x = ex
            if ey > max_excess_y:
                max_excess_y = ey
        tg2 = float(true_gen[2])
        if abs(tg2) > peak_normal_gen:
            peak_normal_gen = abs(tg2)
        if t > TRANSIENT_SKIP:
            sq_err_obs += (float(observer.r[2]) - tg2) ** 2
            sq_err_con += (float(con.generalized[2]) - tg2) ** 2
            n_err += 1
            if governor.last_prediction is not None:
                u1, u2 = governor.last_prediction
                pred_normal_sum += 0.5 * (float(u1[2]) + float(u2[2]))
                stance_normal_sum += 0.5 * (
                    float(grf.forces[plan.stance[0], 2]) + float(grf.forces[plan.stance[1], 2])
                )
                n_pred += 1

        # --- telemetry --------------------------------------------------------
        if (k + 1) % decimate == 0:
            # per-foot recovery from the residual is a logging readout, not a
            # loop state, so it runs at the log rate
            obs_feet = per_foot_forces(observer.r, stance_jacs)
            rows.append(
                _build_row(
                    t, state, euler, x_w, margin, grf, feet, true_gen, observer.r,
                    obs_feet, stance_idx, con, thrusts,
                )
            )

    steps_done = k + 1
    wall = step_times[: steps_done if fault is None else max(steps_done - 1, 0)]
    elapsed = max(t, dt)
    rms_obs = float(np.sqrt(sq_err_obs / n_err)) if n_err else float("nan")
    rms_con = float(np.sqrt(sq_err_con / n_err)) if n_err else float("nan")
    metrics = {
        "duration": t,
        "steps": float(steps_done),
        "mean_forward_speed": float((state.pose.position[0] - p_start[0]) / elapsed),
        "xy_drift": float(np.linalg.norm(state.pose.position[0:2] - p_start[0:2])),
        "min_margin": float(min_margin),
        "max_constraint_violation": float(max(0.0, -min_margin)) if np.isfinite(min_margin) else float("nan"),
        "max_friction_excess_x": float(max_excess_x),
        "max_friction_excess_y": float(max_excess_y),
        "peak_normal_generalized": peak_normal_gen,
        "observer_rms_normal": rms_obs,
        "constrained_rms_normal": rms_con,
        "observer_rms_pct": rms_obs / peak_normal_gen * 100.0 if peak_normal_gen else float("nan"),
        "constrained_rms_pct": rms_con / peak_normal_gen * 100.0 if peak_normal_gen else float("nan"),
        "mean_step_wall_ms": float(np.mean(wall) * 1e3) if wall.size else float("nan"),
        "prediction_faults": float(governor.prediction_faults),
        "mean_predicted_normal": pred_normal_sum / n_pred if n_pred else float("nan"),
        "mean_stance_normal": stance_normal_sum / n_pred if n_pred else float("nan"),
    }

    result = ScenarioResult(
        config=config,
        rows=rows,
        metrics=metrics,
        fault=fault,
        step_times=wall.copy(),
    )
    if out_path is not None:
        result.write(out_path)
    return result


def _build_row(
    t: float,
    state: RobotState,
    euler: np.ndarray,
    x_w: np.ndarray,
    margin: float,
    grf,
    feet: np.ndarray,
    true_gen: np.ndarray,
    residual: np.ndarray,
    obs_feet: np.ndarray,
    stance_idx: np.ndarray,
    con,
    thrusts: np.ndarray,
) -> np.ndarray:
    row = np.zeros(N_COLUMNS)
    obs_full = np.zeros((NUM_LEGS, 3))
    lam_full = np.zeros((NUM_LEGS, 3))
    for j, i in enumerate(stance_idx):
        obs_full[i] = obs_feet[j]
        if not con.empty:
            lam_full[i] = con.forces[j]
    parts = [
        [t],
        state.pose.position,
        euler,
        state.twist.linear,
        state.twist.angular,
        x_w,
        [margin],
        feet.reshape(-1),
        grf.in_contact.astype(float),
        grf.forces.reshape(-1),
        np.stack([state.legs.gamma, state.legs.phi, state.legs.length], axis=1).reshape(-1),
        true_gen,
        residual,
        obs_full.reshape(-1),
        lam_full.reshape(-1),
        con.generalized if not con.empty else np.zeros(6),
        thrusts,
    ]
    np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)) for p in parts], out=row)
    return row


def bench(config: SimConfig, steps: int = 2000, warmup: int = 100) -> dict[str, float]:
    """Wall-clock statistics of the control+integration+estimation step."""
    result = run_scenario(config, duration=steps * config.dt)
    times = result.step_times[warmup:] if result.step_times.size > warmup else result.step_times
    ms = times * 1e3
    return {
        "steps": float(ms.size),
        "mean_ms": float(np.mean(ms)),
        "p50_ms": float(np.percentile(ms, 50)),
        "p95_ms": float(np.percentile(ms, 95)),
        "p99_ms": float(np.percentile(ms, 99)),
        "max_ms": float(np.max(ms)),
    }

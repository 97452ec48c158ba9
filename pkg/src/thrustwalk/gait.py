"""Trot gait generation: diagonal-pair scheduling, heuristic swing-foot
placement, swing interpolation, leg inverse kinematics, and joint-space
acceleration commands.

The planner drives the body like a treadmill: stance feet track world-fixed
anchor points through inverse kinematics taken about a *reference* body pose
whose horizontal position integrates the applied velocity. When the actual
body lags the reference, the stance feet are commanded slightly behind their
anchors, slide, and ground friction pulls the body forward; when tracking is
perfect the feet are simply pinned. Swing feet fly a smooth arc to a
velocity-based touchdown point computed from the hip projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import asin, atan2, cos, floor, pi, sin, sqrt
from typing import NamedTuple

import numpy as np

from .dynamics import (
    NUM_LEGS,
    LegId,
    LegJoints,
    ModelParams,
    RobotState,
    foot_positions,
)

_PAIR_A = (LegId.FR, LegId.BL)
_PAIR_B = (LegId.FL, LegId.BR)


@dataclass
class GaitSchedule:
    """Trot timing: a full cycle is two steps, each diagonal pair standing for
    half the cycle. Exactly two legs are in stance at any planner time."""

    cycle_time: float = 0.8     # full gait cycle [s]; one step lasts cycle_time / 2
    swing_height: float = 0.05  # swing apex above the higher endpoint [m]

    @property
    def step_time(self) -> float:
        return self.cycle_time / 2.0

    def validate(self) -> None:
        if self.cycle_time <= 0.0:
            raise ValueError("cycle_time must be positive")
        if self.swing_height < 0.0:
            raise ValueError("swing_height must be nonnegative")


class StancePhase(NamedTuple):
    stance: tuple[LegId, LegId]
    swing: tuple[LegId, LegId]
    phase: float  # [0, 1) within the current half-cycle


def stance_pair(t: float, sched: GaitSchedule) -> StancePhase:
    """Deterministic diagonal-pair alternation; {FR, BL} stands first."""
    half = sched.step_time
    k = floor(t / half + 1e-12)
    phase = t / half - k
    if phase < 0.0:
        phase = 0.0
    if k % 2 == 0:
        return StancePhase(_PAIR_A, _PAIR_B, phase)
    return StancePhase(_PAIR_B, _PAIR_A, phase)


def swing_foot_target(
    state: RobotState,
    v_applied: np.ndarray,
    sched: GaitSchedule,
    params: ModelParams,
    leg: LegId,
    ground_height: float = 0.0,
    velocity_gain: float = 0.03,
) -> np.ndarray:
    """Touchdown point: hip ground projection plus a half-stance feedforward
    along the applied velocity plus a proportional velocity-error correction."""
    R = state.pose.rotation
    hip = state.pose.position + R @ params.hip_offsets[int(leg)]
    target = hip.copy()
    target[2] = ground_height
    t_stance = sched.step_time
    err = state.twist.linear - np.asarray(v_applied, dtype=float)
    target[0:2] += 0.5 * t_stance * np.asarray(v_applied, dtype=float)[0:2]
    target[0:2] += velocity_gain * err[0:2]
    return target


def _smoothstep(u: float) -> tuple[float, float, float]:
    """Cubic blend 3u^2 - 2u^3 with zero slope at both ends; returns (w, w', w'')."""
    return 3 * u * u - 2 * u**3, 6 * u - 6 * u * u, 6 - 12 * u


def swing_trajectory(
    phase: float,
    liftoff: np.ndarray,
    target: np.ndarray,
    swing_height: float,
    phase_rate: float = 1.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Interpolate a swing arc at the given phase in [0, 1].

    Ground-plane coordinates follow a cubic blend between liftoff and target;
    the vertical adds a sin^2 arc whose apex at mid-phase reaches
    max(liftoff_z, target_z) + swing_height. Endpoint velocities are zero,
    so the returned profile is C1 at both ends. Derivatives are scaled by
    phase_rate (pass 1/duration for time derivatives).
    """
    u = float(np.clip(phase, 0.0, 1.0))
    liftoff = np.asarray(liftoff, dtype=float)
    target = np.asarray(target, dtype=float)
    w, dw, ddw = _smoothstep(u)

    pos = liftoff + w * (target - liftoff)
    vel = dw * (target - liftoff)
    acc = ddw * (target - liftoff)

    apex = max(liftoff[2], target[2]) + swing_height
    amp = apex - 0.5 * (liftoff[2] + target[2])
    s, c = np.sin(np.pi * u), np.cos(np.pi * u)
    pos[2] += amp * s * s
    vel[2] += amp * np.pi * 2.0 * s * c
    acc[2] += amp * 2.0 * np.pi**2 * (c * c - s * s)

    return pos, vel * phase_rate, acc * phase_rate**2


class IkResult(NamedTuple):
    gamma: float
    phi: float
    length: float
    clamped: bool


def inverse_kinematics_pose(
    target_world: np.ndarray,
    body_position: np.ndarray,
    body_rotation: np.ndarray,
    params: ModelParams,
    leg: LegId,
) -> IkResult:
    """Leg IK about an arbitrary body pose (the planner uses reference poses)."""
    d = body_rotation.T @ (np.asarray(target_world, dtype=float) - body_position)
    d = d - params.hip_offsets[int(leg)]
    length = float(np.linalg.norm(d))
    clamped = False

    if length < 1e-9:
        # degenerate: direction undefined, fall back to a straight short leg
        return IkResult(0.0, 0.0, params.leg_length_min, True)

    gamma = float(np.arcsin(np.clip(d[1] / length, -1.0, 1.0)))
    phi = float(np.arctan2(-d[0], -d[2]))

    if not params.leg_length_min <= length <= params.leg_length_max:
        length = float(np.clip(length, params.leg_length_min, params.leg_length_max))
        clamped = True
    half_pi = np.pi / 2
    if abs(gamma) > half_pi or abs(phi) > half_pi:
        gamma = float(np.clip(gamma, -half_pi, half_pi))
        phi = float(np.clip(phi, -half_pi, half_pi))
        clamped = True
    return IkResult(gamma, phi, length, clamped)


def inverse_kinematics(
    foot_target_world: np.ndarray, state: RobotState, params: ModelParams, leg: LegId
) -> IkResult:
    """Leg IK about the actual body pose; inverse of forward_kinematics."""
    return inverse_kinematics_pose(
        foot_target_world, state.pose.position, state.pose.rotation, params, leg
    )


@dataclass
class JointGains:
    kp: float = 400.0
    kd: float = 40.0


@dataclass
class JointReference:
    """Per-leg joint targets with rates and feedforward accelerations, (4,) arrays."""

    gamma: np.ndarray = field(default_factory=lambda: np.zeros(NUM_LEGS))
    phi: np.ndarray = field(default_factory=lambda: np.zeros(NUM_LEGS))
    length: np.ndarray = field(default_factory=lambda: np.full(NUM_LEGS, 0.3))
    gamma_rate: np.ndarray = field(default_factory=lambda: np.zeros(NUM_LEGS))
    phi_rate: np.ndarray = field(default_factory=lambda: np.zeros(NUM_LEGS))
    length_rate: np.ndarray = field(default_factory=lambda: np.zeros(NUM_LEGS))
    accel: np.ndarray = field(default_factory=lambda: np.zeros(3 * NUM_LEGS))

    def positions_vector(self) -> np.ndarray:
        return np.stack([self.gamma, self.phi, self.length], axis=1).reshape(-1)

    def rates_vector(self) -> np.ndarray:
        return np.stack([self.gamma_rate, self.phi_rate, self.length_rate], axis=1).reshape(-1)


def joint_command(ref: JointReference, legs: LegJoints, gains: JointGains) -> np.ndarray:
    """Joint acceleration inputs: feedforward plus PD on position and rate error."""
    e = ref.positions_vector() - legs.positions_vector()
    de = ref.rates_vector() - legs.rates_vector()
    return ref.accel + gains.kp * e + gains.kd * de


@dataclass
class PlannerOutput:
    u_L: np.ndarray
    reference: JointReference
    stance: tuple[LegId, LegId]
    swing: tuple[LegId, LegId]
    phase: float
    stance_points: np.ndarray   # (2, 3) world anchors of the stance pair
    swing_targets: np.ndarray   # (2, 3) current touchdown targets
    clamped: bool


class GaitPlanner:
    """Stateful trot planner; single writer, stepped once per control tick."""

    def __init__(
        self,
        sched: GaitSchedule,
        params: ModelParams,
        gains: JointGains,
        standing_leg_length: float = 0.3,
        velocity_gain: float = 0.03,
        ground_height: float = 0.0,
        heading_reference: float = 0.0,
    ):
        self.sched = sched
        self.params = params
        self.gains = gains
        self.standing_leg_length = standing_leg_length
        self.velocity_gain = velocity_gain
        self.ground_height = ground_height
        self.heading_reference = heading_reference
        self._hips = [[float(v) for v in row] for row in params.hip_offsets]

        self.t = 0.0
        self._anchors = np.zeros((NUM_LEGS, 3))
        self._liftoff = np.zeros((NUM_LEGS, 3))
        self._stance: tuple[LegId, LegId] = _PAIR_A
        self._p_ref = np.zeros(3)
        self._prev_q_ref: np.ndarray | None = None

    def current_stance_points(self) -> np.ndarray:
        """(2, 3) world anchors of the pair currently scheduled to stand."""
        return self._anchors[list(self._stance)].copy()

    def reset(self, state: RobotState) -> None:
        feet = foot_positions(state, self.params)
        self._anchors = feet.copy()
        self._anchors[:, 2] = self.ground_height
        self._liftoff = feet.copy()
        self._p_ref = state.pose.position.copy()
        self._p_ref[2] = self.ground_height + self.standing_leg_length
        self.t = 0.0
        self._stance = _PAIR_A
        self._prev_q_ref = None

    def update(self, state: RobotState, v_applied: np.ndarray, dt: float) -> PlannerOutput:
        self.t += dt
        v_app = np.asarray(v_applied, dtype=float)
        self._p_ref[0:2] += v_app[0:2] * dt

        sp = stance_pair(self.t, self.sched)
        if sp.stance != self._stance:
            feet = foot_positions(state, self.params)
            for leg in sp.stance:  # legs touching down: pin at the surface
                self._anchors[leg, 0:2] = feet[leg, 0:2]
                self._anchors[leg, 2] = self.ground_height
            for leg in sp.swing:
                self._liftoff[leg] = feet[leg]
            self._stance = sp.stance
            self._prev_q_ref = None  # joint refs jump at the handover; skip rate estimate

        # scalar inner loop: this runs at the full control rate and numpy
        # dispatch on 3-vectors costs more than the arithmetic
        px, py, pz = state.pose.position.tolist()
        r00, r01, r02, r10, r11, r12, r20, r21, r22 = state.pose.rotation.ravel().tolist()
        # stance legs are commanded in the *reference* heading frame: a yaw
        # error then drags the feet against the ground and friction steers
        # the heading back (yaw is not actuated by the upward-only fans)
        cy, sy = cos(self.heading_reference), sin(self.heading_reference)
        st = list(sp.stance)
        sw = list(sp.swing)
        hips = self._hips
        l_min, l_max = self.params.leg_length_min, self.params.leg_length_max
        half_pi = pi / 2

        # swing interpolation weights (positions only; rates come from differencing)
        u = sp.phase
        w_blend = 3.0 * u * u - 2.0 * u**3
        arc = sin(pi * u) ** 2
        vax, vay = float(v_app[0]), float(v_app[1])
        vlin = state.twist.linear
        feedfwd_x = 0.5 * self.sched.step_time * vax + self.velocity_gain * (float(vlin[0]) - vax)
        feedfwd_y = 0.5 * self.sched.step_time * vay + self.velocity_gain * (float(vlin[1]) - vay)

        d_rows = [None] * NUM_LEGS
        swing_targets = np.zeros((2, 3))
        rx, ry, rz = self._p_ref.tolist()
        for leg in st:
            ax, ay, az = self._anchors[leg].tolist()
            ex, ey, ez = ax - rx, ay - ry, az - rz
            hip = hips[leg]
            # heading-frame displacement Rz(yaw)^T e
            d_rows[leg] = (
                cy * ex + sy * ey - hip[0],
                -sy * ex + cy * ey - hip[1],
                ez - hip[2],
            )
        for k, leg in enumerate(sw):
            hip = hips[leg]
            tx = px + r00 * hip[0] + r01 * hip[1] + r02 * hip[2] + feedfwd_x
            ty = py + r10 * hip[0] + r11 * hip[1] + r12 * hip[2] + feedfwd_y
            tz = self.ground_height
            lx, ly, lz = self._liftoff[leg].tolist()
            gx = lx + w_blend * (tx - lx)
            gy = ly + w_blend * (ty - ly)
            gz = lz + w_blend * (tz - lz)
            gz += (max(lz, tz) + self.sched.swing_height - 0.5 * (lz + tz)) * arc
            swing_targets[k] = (gx, gy, gz)
            ex, ey, ez = gx - px, gy - py, gz - pz
            d_rows[leg] = (
                r00 * ex + r10 * ey + r20 * ez - hip[0],
                r01 * ex + r11 * ey + r21 * ez - hip[1],
                r02 * ex + r12 * ey + r22 * ez - hip[2],
            )

        clamped = False
        q_ref_rows = []
        for dx, dy, dz in d_rows:
            length = sqrt(dx * dx + dy * dy + dz * dz)
            if length < 1e-9:
                q_ref_rows.append((0.0, 0.0, l_min))
                clamped = True
                continue
            arg = dy / length
            gamma = asin(-1.0 if arg < -1.0 else (1.0 if arg > 1.0 else arg))
            phi = atan2(-dx, -dz)
            if not l_min <= length <= l_max:
                length = l_min if length < l_min else l_max
                clamped = True
            if abs(phi) > half_pi:
                phi = -half_pi if phi < 0.0 else half_pi
                clamped = True
            q_ref_rows.append((gamma, phi, length))

        q_ref = np.array(q_ref_rows)
        if self._prev_q_ref is not None:
            dq_ref = (q_ref - self._prev_q_ref) / dt
        else:
            dq_ref = np.zeros((NUM_LEGS, 3))
        self._prev_q_ref = q_ref

        ref = JointReference(
            gamma=q_ref[:, 0], phi=q_ref[:, 1], length=q_ref[:, 2],
            gamma_rate=dq_ref[:, 0], phi_rate=dq_ref[:, 1], length_rate=dq_ref[:, 2],
        )
        legs = state.legs
        kp, kd = self.gains.kp, self.gains.kd
        e_g = kp * (q_ref[:, 0] - legs.gamma) + kd * (dq_ref[:, 0] - legs.gamma_rate)
        e_p = kp * (q_ref[:, 1] - legs.phi) + kd * (dq_ref[:, 1] - legs.phi_rate)
        e_l = kp * (q_ref[:, 2] - legs.length) + kd * (dq_ref[:, 2] - legs.length_rate)
        u_L = np.empty(3 * NUM_LEGS)
        u_L[0::3] = e_g
        u_L[1::3] = e_p
        u_L[2::3] = e_l

        return PlannerOutput(
            u_L=u_L,
            reference=ref,
            stance=sp.stance,
            swing=sp.swing,
            phase=sp.phase,
            stance_points=self._anchors[st].copy(),
            swing_targets=swing_targets,
            clamped=clamped,
        )

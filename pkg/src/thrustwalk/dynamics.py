"""Reduced-order quadruped rigid-body model: a single floating body with four
massless, length-variable legs.

State layout and conventions:
  - world frame: x forward, y left, z up; gravity along -z
  - body attitude R (body -> world) is integrated directly as a matrix
  - body angular velocity omega is expressed in the body frame
  - leg i in {FR, FL, BR, BL} has hip-frontal angle gamma_i, hip-sagittal
    angle phi_i and leg length l_i; the foot sits at
        p_F = p_B + R p_hip + R Ry(phi) Rx(gamma) [0, 0, -l]^T
  - the 6-dof generalized velocity is v = [dp_B; omega], so the mass matrix
    is the constant block diagonal of m*I3 and the body inertia, and the
    generalized force convention is [world-frame force; body-frame moment]

A RobotState flattens into a 42-vector for fixed-step integration:
  [p_B(3), R(9 row-major), dp_B(3), omega(3), q_L(12), dq_L(12)]
with q_L ordered (gamma, phi, length) per leg, legs in FR, FL, BR, BL order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import TYPE_CHECKING

import numpy as np

from .so3 import orthonormalize, rotation_defect, skew

if TYPE_CHECKING:
    from .contact import GrfSet

STATE_DIM = 42
NUM_LEGS = 4


class LegId(IntEnum):
    FR = 0
    FL = 1
    BR = 2
    BL = 3


LEG_NAMES = ("FR", "FL", "BR", "BL")


@dataclass
class BodyPose:
    """Body position [m] and rotation matrix (body -> world)."""

    position: np.ndarray
    rotation: np.ndarray

    def validate(self, tol: float = 1e-9) -> None:
        if self.position.shape != (3,) or self.rotation.shape != (3, 3):
            raise ValueError("pose arrays have wrong shape")
        if rotation_defect(self.rotation) > tol:
            raise ValueError("rotation matrix is not orthonormal")
        if abs(np.linalg.det(self.rotation) - 1.0) > tol:
            raise ValueError("rotation matrix determinant is not +1")


@dataclass
class BodyTwist:
    """Linear velocity [m/s, world] and angular velocity [rad/s, body frame]."""

    linear: np.ndarray
    angular: np.ndarray

    def validate(self) -> None:
        if self.linear.shape != (3,) or self.angular.shape != (3,):
            raise ValueError("twist arrays have wrong shape")
        if not (np.isfinite(self.linear).all() and np.isfinite(self.angular).all()):
            raise ValueError("twist has non-finite entries")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.linear, self.angular])


@dataclass
class LegJoints:
    """Joint coordinates and rates for all four legs, stored as (4,) arrays."""

    gamma: np.ndarray
    phi: np.ndarray
    length: np.ndarray
    gamma_rate: np.ndarray
    phi_rate: np.ndarray
    length_rate: np.ndarray

    @classmethod
    def neutral(cls, length: float = 0.3) -> "LegJoints":
        z = np.zeros(NUM_LEGS)
        return cls(z.copy(), z.copy(), np.full(NUM_LEGS, length), z.copy(), z.copy(), z.copy())

    def positions_vector(self) -> np.ndarray:
        """12-vector (gamma, phi, length) per leg, legs in FR, FL, BR, BL order."""
        return np.stack([self.gamma, self.phi, self.length], axis=1).reshape(-1)

    def rates_vector(self) -> np.ndarray:
        return np.stack([self.gamma_rate, self.phi_rate, self.length_rate], axis=1).reshape(-1)

    @classmethod
    def from_vectors(cls, q: np.ndarray, dq: np.ndarray) -> "LegJoints":
        q = np.asarray(q, dtype=float).reshape(NUM_LEGS, 3)
        dq = np.asarray(dq, dtype=float).reshape(NUM_LEGS, 3)
        return cls(q[:, 0].copy(), q[:, 1].copy(), q[:, 2].copy(),
                   dq[:, 0].copy(), dq[:, 1].copy(), dq[:, 2].copy())

    def validate(self, params: "ModelParams") -> None:
        if np.any(self.length < params.leg_length_min - 1e-12) or np.any(
            self.length > params.leg_length_max + 1e-12
        ):
            raise ValueError("leg length outside limits")
        if np.any(np.abs(self.gamma) > np.pi / 2 + 1e-12) or np.any(
            np.abs(self.phi) > np.pi / 2 + 1e-12
        ):
            raise ValueError("hip angle outside +/- pi/2")


@dataclass
class RobotState:
    pose: BodyPose
    twist: BodyTwist
    legs: LegJoints

    def to_vector(self) -> np.ndarray:
        x = np.empty(STATE_DIM)
        x[0:3] = self.pose.position
        x[3:12] = self.pose.rotation.reshape(-1)
        x[12:15] = self.twist.linear
        x[15:18] = self.twist.angular
        x[18:30] = self.legs.positions_vector()
        x[30:42] = self.legs.rates_vector()
        return x

    @classmethod
    def from_vector(cls, x: np.ndarray, renormalize: bool = False, copy: bool = True) -> "RobotState":
        """Unpack a flat 42-vector; copy=False shares storage with x (callers
        must then treat the vector as immutable)."""
        R = x[3:12].reshape(3, 3)
        if renormalize:
            R = orthonormalize(R)
        if not copy:
            return cls(
                pose=BodyPose(position=x[0:3], rotation=R),
                twist=BodyTwist(linear=x[12:15], angular=x[15:18]),
                legs=LegJoints(
                    x[18:30:3], x[19:30:3], x[20:30:3], x[30:42:3], x[31:42:3], x[32:42:3]
                ),
            )
        return cls(
            pose=BodyPose(position=x[0:3].copy(), rotation=R.copy()),
            twist=BodyTwist(linear=x[12:15].copy(), angular=x[15:18].copy()),
            legs=LegJoints.from_vectors(x[18:30], x[30:42]),
        )

    @classmethod
    def standing(cls, body_height: float = 0.3, leg_length: float = 0.3) -> "RobotState":
        """Body level at the given height, legs straight down, zero velocity."""
        return cls(
            pose=BodyPose(position=np.array([0.0, 0.0, body_height]), rotation=np.eye(3)),
            twist=BodyTwist(linear=np.zeros(3), angular=np.zeros(3)),
            legs=LegJoints.neutral(leg_length),
        )


def _default_hips() -> np.ndarray:
    return np.array(
        [
            [0.15, -0.10, 0.0],   # FR
            [0.15, 0.10, 0.0],    # FL
            [-0.15, -0.10, 0.0],  # BR
            [-0.15, 0.10, 0.0],   # BL
        ]
    )


def _default_thrusters() -> np.ndarray:
    return np.array(
        [
            [0.15, -0.15, 0.0],
            [0.15, 0.15, 0.0],
            [-0.15, -0.15, 0.0],
            [-0.15, 0.15, 0.0],
        ]
    )


@dataclass
class ModelParams:
    """Physical parameters of the reduced-order model.

    Geometry defaults are plausible desk-scale values and fully overridable
    from scenario config; mass and thrust limits follow the target platform
    (8 kg body, 2 kgf per ducted fan).
    """

    mass: float = 8.0
    inertia: np.ndarray = field(default_factory=lambda: np.diag([0.08, 0.30, 0.30]))
    hip_offsets: np.ndarray = field(default_factory=_default_hips)
    thruster_offsets: np.ndarray = field(default_factory=_default_thrusters)
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))
    max_thrust: float = 19.62
    leg_length_min: float = 0.15
    leg_length_max: float = 0.45

    def validate(self) -> None:
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.inertia.shape != (3, 3) or np.linalg.norm(self.inertia - self.inertia.T) > 1e-12:
            raise ValueError("inertia must be symmetric 3x3")
        if np.any(np.linalg.eigvalsh(self.inertia) <= 0.0):
            raise ValueError("inertia must be positive definite")
        if self.hip_offsets.shape != (NUM_LEGS, 3) or self.thruster_offsets.shape != (NUM_LEGS, 3):
            raise ValueError("hip/thruster offsets must be (4, 3)")
        if not 0.0 < self.leg_length_min < self.leg_length_max:
            raise ValueError("leg length limits must satisfy 0 < min < max")
        if self.max_thrust <= 0.0:
            raise ValueError("max_thrust must be positive")

    @property
    def weight(self) -> float:
        return self.mass * float(np.linalg.norm(self.gravity))


@dataclass
class Wrench:
    """Force/moment pair with an explicit frame tag ('world' or 'body')."""

    force: np.ndarray
    moment: np.ndarray
    frame: str = "world"

    @classmethod
    def zero(cls, frame: str = "world") -> "Wrench":
        return cls(np.zeros(3), np.zeros(3), frame)

    def as_generalized(self, rotation: np.ndarray) -> np.ndarray:
        """6-vector in the equation-of-motion convention: world force, body moment."""
        if self.frame == "world":
            return np.concatenate([self.force, rotation.T @ self.moment])
        if self.frame == "body":
            return np.concatenate([rotation @ self.force, self.moment])
        raise ValueError(f"unknown wrench frame {self.frame!r}")

    def force_world(self, rotation: np.ndarray) -> np.ndarray:
        return self.force if self.frame == "world" else rotation @ self.force

    def moment_world(self, rotation: np.ndarray) -> np.ndarray:
        return self.moment if self.frame == "world" else rotation @ self.moment


# ---------------------------------------------------------------------------
# kinematics
# ---------------------------------------------------------------------------

def leg_vectors(legs: LegJoints) -> np.ndarray:
    """(4, 3) hip->foot vectors in the body frame: Ry(phi) Rx(gamma) [0,0,-l]."""
    cg, sg = np.cos(legs.gamma), np.sin(legs.gamma)
    cp, sp = np.cos(legs.phi), np.sin(legs.phi)
    l = legs.length
    return np.stack([-l * cg * sp, l * sg, -l * cg * cp], axis=1)


def leg_vector_rates(legs: LegJoints) -> np.ndarray:
    """(4, 3) time derivative of leg_vectors due to joint motion (body frame)."""
    cg, sg = np.cos(legs.gamma), np.sin(legs.gamma)
    cp, sp = np.cos(legs.phi), np.sin(legs.phi)
    l = legs.length
    dg, dp, dl = legs.gamma_rate, legs.phi_rate, legs.length_rate
    dx = (l * sg * sp) * dg + (-l * cg * cp) * dp + (-cg * sp) * dl
    dy = (l * cg) * dg + sg * dl
    dz = (l * sg * cp) * dg + (l * cg * sp) * dp + (-cg * cp) * dl
    return np.stack([dx, dy, dz], axis=1)


def foot_body_offsets(state: RobotState, params: ModelParams) -> np.ndarray:
    """(4, 3) body-frame vectors from the body origin (COM) to each foot."""
    return params.hip_offsets + leg_vectors(state.legs)


def foot_positions(state: RobotState, params: ModelParams) -> np.ndarray:
    """(4, 3) world-frame foot positions."""
    r = foot_body_offsets(state, params)
    return state.pose.position + r @ state.pose.rotation.T


def forward_kinematics(state: RobotState, params: ModelParams, leg: LegId) -> np.ndarray:
    """World-frame position of a single foot."""
    return foot_positions(state, params)[int(leg)]


def _cross_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise cross product for (n, 3) arrays (np.cross is slow on tiny inputs)."""
    out = np.empty_like(b)
    out[:, 0] = a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1]
    out[:, 1] = a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2]
    out[:, 2] = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    return out


def foot_velocities(state: RobotState, params: ModelParams) -> np.ndarray:
    """(4, 3) world-frame foot velocities including body twist and joint rates."""
    R = state.pose.rotation
    r = foot_body_offsets(state, params)
    w = state.twist.angular
    # R [omega]x r == R (omega x r)
    spin = np.empty_like(r)
    spin[:, 0] = w[1] * r[:, 2] - w[2] * r[:, 1]
    spin[:, 1] = w[2] * r[:, 0] - w[0] * r[:, 2]
    spin[:, 2] = w[0] * r[:, 1] - w[1] * r[:, 0]
    joint = leg_vector_rates(state.legs)
    return state.twist.linear + (spin + joint) @ R.T


def foot_velocity(state: RobotState, params: ModelParams, leg: LegId) -> np.ndarray:
    return foot_velocities(state, params)[int(leg)]


def foot_velocity_jacobian(state: RobotState, params: ModelParams, leg: LegId) -> np.ndarray:
    """3x6 sensitivity of one foot's world velocity to the body twist [dp_B; omega].

    Translational block is the identity; rotational block is -R [r]x with r the
    body-frame foot offset (joint rates are not part of the body twist, so
    their contribution does not appear here).
    """
    R = state.pose.rotation
    r = foot_body_offsets(state, params)[int(leg)]
    B = np.zeros((3, 6))
    B[:, 0:3] = np.eye(3)
    B[:, 3:6] = -R @ skew(r)
    return B


def foot_jacobians(state: RobotState, params: ModelParams) -> np.ndarray:
    """(4, 3, 6) stack of foot_velocity_jacobian over all legs."""
    R = state.pose.rotation
    r = foot_body_offsets(state, params)
    S = np.zeros((NUM_LEGS, 3, 3))
    S[:, 0, 1] = -r[:, 2]
    S[:, 0, 2] = r[:, 1]
    S[:, 1, 0] = r[:, 2]
    S[:, 1, 2] = -r[:, 0]
    S[:, 2, 0] = -r[:, 1]
    S[:, 2, 1] = r[:, 0]
    B = np.zeros((NUM_LEGS, 3, 6))
    B[:, :, 0:3] = np.eye(3)
    B[:, :, 3:6] = -np.matmul(R, S)
    return B


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------

def mass_matrix(params: ModelParams) -> np.ndarray:
    """Constant 6x6 generalized mass matrix blkdiag(m I3, I_body).

    Constant because the legs are massless and omega lives in the body frame.
    """
    M = np.zeros((6, 6))
    M[0:3, 0:3] = params.mass * np.eye(3)
    M[3:6, 3:6] = params.inertia
    return M


def bias_vector(state: RobotState, params: ModelParams) -> np.ndarray:
    """Bias h with M dv + h = (generalized applied force).

    Gravity appears in the translational rows, the gyroscopic coupling
    omega x (I omega) in the rotational rows.
    """
    w = state.twist.angular
    Iw = params.inertia @ w
    gyro = np.array(
        [w[1] * Iw[2] - w[2] * Iw[1], w[2] * Iw[0] - w[0] * Iw[2], w[0] * Iw[1] - w[1] * Iw[0]]
    )
    return np.concatenate([-params.mass * params.gravity, gyro])


def thruster_wrench(thrusts: np.ndarray, state: RobotState, params: ModelParams) -> Wrench:
    """Condense four upward body-frame thruster forces into a body-frame wrench.

    Each fan pushes along +z of the body; moments are taken about the COM.
    Rejects thrusts outside [0, max_thrust].
    """
    thrusts = np.asarray(thrusts, dtype=float)
    if thrusts.shape != (NUM_LEGS,):
        raise ValueError("expected four thrust values")
    if np.any(thrusts < 0.0) or np.any(thrusts > params.max_thrust + 1e-9):
        raise ValueError("thrusts must lie in [0, max_thrust]")
    force = np.array([0.0, 0.0, float(np.sum(thrusts))])
    p = params.thruster_offsets
    # p x (f z_hat) per fan: (p_y f, -p_x f, 0)
    moment = np.array([float(np.dot(p[:, 1], thrusts)), float(-np.dot(p[:, 0], thrusts)), 0.0])
    return Wrench(force=force, moment=moment, frame="body")


def grf_generalized(state: RobotState, params: ModelParams, forces: np.ndarray) -> np.ndarray:
    """Sum of B_i^T u_i over the feet for world-frame per-foot forces (4, 3).

    Equals [sum of forces (world); sum of r_i x R^T u_i (body moment)].
    """
    R = state.pose.rotation
    r = foot_body_offsets(state, params)
    f_body = forces @ R
    return np.concatenate([forces.sum(axis=0), _cross_rows(r, f_body).sum(axis=0)])


def dynamics_rhs(
    state: RobotState,
    grf: "GrfSet",
    u_t: Wrench,
    u_L: np.ndarray,
    params: ModelParams,
) -> np.ndarray:
    """Full 42-dim state derivative under the given contact forces and inputs.

    M dv = sum_i B_i^T u_gi + u_t - h, dR = R [omega]x, leg accelerations are
    the direct joint inputs u_L. The mass matrix is constant and SPD, so the
    solve never fails.
    """
    R = state.pose.rotation
    w = state.twist.angular

    total = grf_generalized(state, params, grf.forces)
    total += u_t.as_generalized(R)
    total -= bias_vector(state, params)

    dv_lin = total[0:3] / params.mass
    dv_ang = np.linalg.solve(params.inertia, total[3:6])

    dx = np.empty(STATE_DIM)
    dx[0:3] = state.twist.linear
    dx[3:12] = (R @ skew(w)).reshape(-1)
    dx[12:15] = dv_lin
    dx[15:18] = dv_ang
    dx[18:30] = state.legs.rates_vector()
    dx[30:42] = np.asarray(u_L, dtype=float)
    return dx

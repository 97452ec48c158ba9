"""Compliant ground contact: spring-damper normal force plus Stribeck friction.

The ground is a flat plane at a configurable height. Normal force is a
unilateral spring-damper (clamped at zero so the ground never pulls); the
tangential force per horizontal axis blends static and Coulomb friction
through an exponential in slip speed plus a viscous term. The sign function
uses sgn(0) = 0, so the Coulomb term vanishes exactly at rest; the resulting
discontinuity at zero slip speed is a known, accepted estimation error source.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import NUM_LEGS, ModelParams, RobotState, foot_positions, foot_velocities


@dataclass
class GroundParams:
    """Compliant plane and friction coefficients."""

    k_normal: float = 10000.0       # spring stiffness [N/m]
    d_normal: float = 100.0         # damping [N s/m]
    mu_coulomb: float = 0.2         # kinetic (Coulomb) coefficient
    mu_static: float = 0.25         # static coefficient, >= mu_coulomb
    mu_viscous: float = 1.0         # viscous coefficient [N s/m]
    stribeck_velocity: float = 0.1  # blend speed [m/s]
    height: float = 0.0             # plane height [m]

    def validate(self) -> None:
        if self.k_normal <= 0.0 or self.d_normal < 0.0:
            raise ValueError("need k_normal > 0 and d_normal >= 0")
        if not 0.0 < self.mu_coulomb <= self.mu_static:
            raise ValueError("need 0 < mu_coulomb <= mu_static")
        if self.mu_viscous < 0.0 or self.stribeck_velocity <= 0.0:
            raise ValueError("need mu_viscous >= 0 and stribeck_velocity > 0")


@dataclass
class GrfSet:
    """Per-foot world-frame contact forces plus contact flags and penetrations."""

    forces: np.ndarray                 # (4, 3)
    in_contact: np.ndarray             # (4,) bool
    penetration: np.ndarray = field(default_factory=lambda: np.zeros(NUM_LEGS))

    @classmethod
    def zero(cls) -> "GrfSet":
        return cls(np.zeros((NUM_LEGS, 3)), np.zeros(NUM_LEGS, dtype=bool))

    def total_force(self) -> np.ndarray:
        return self.forces.sum(axis=0)


def stribeck_factor(speed: np.ndarray, params: GroundParams) -> np.ndarray:
    """Velocity-dependent friction coefficient: mu_static at rest, mu_coulomb at speed."""
    mu_c, mu_s = params.mu_coulomb, params.mu_static
    return mu_c - (mu_c - mu_s) * np.exp(-np.square(speed) / params.stribeck_velocity**2)


def grf_for_foot(foot_pos: np.ndarray, foot_vel: np.ndarray, params: GroundParams) -> np.ndarray:
    """World-frame contact force for a single foot point."""
    f, _, _ = grf_forces(foot_pos[None, :], foot_vel[None, :], params)
    return f[0]


def grf_forces(
    positions: np.ndarray, velocities: np.ndarray, params: GroundParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized contact law over (n, 3) foot positions/velocities.

    Returns (forces (n,3), in_contact (n,), penetration (n,)); penetration is
    positive below the surface.
    """
    z = positions[:, 2] - params.height
    contact = z <= 0.0

    u_z = np.where(contact, -params.k_normal * z - params.d_normal * velocities[:, 2], 0.0)
    u_z = np.maximum(u_z, 0.0)

    forces = np.zeros_like(positions)
    for axis in (0, 1):
        v = velocities[:, axis]
        s = stribeck_factor(np.abs(v), params)
        forces[:, axis] = np.where(contact, -s * u_z * np.sign(v) - params.mu_viscous * v, 0.0)
    forces[:, 2] = u_z
    return forces, contact, np.where(contact, -z, 0.0)


def grf_all(state: RobotState, model: ModelParams, ground: GroundParams) -> GrfSet:
    """Evaluate the contact law at every foot of the current state."""
    pos = foot_positions(state, model)
    vel = foot_velocities(state, model)
    forces, contact, pen = grf_forces(pos, vel, ground)
    return GrfSet(forces=forces, in_contact=contact, penetration=pen)

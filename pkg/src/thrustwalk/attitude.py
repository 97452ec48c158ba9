"""Attitude stabilization through the body-mounted ducted fans.

A PD law on Z-Y-X Euler errors produces a moment demand; a least-squares
allocation maps the roll/pitch part onto the four upward-only fans and clamps
each to its physical range. Yaw cannot be actuated by upward body-frame
forces, so the yaw component of the demand is reported as a residual and
dropped. The derivative term damps (negative feedback on Euler rates).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import ModelParams


@dataclass
class AttitudeGains:
    """Diagonal PD gains on (roll, pitch, yaw) and the per-fan thrust ceiling."""

    kp: np.ndarray = field(default_factory=lambda: np.array([60.0, 60.0, 0.0]))
    kd: np.ndarray = field(default_factory=lambda: np.array([8.0, 8.0, 0.0]))
    max_thrust: float = 19.62

    def validate(self) -> None:
        if np.any(self.kp < 0.0) or np.any(self.kd < 0.0):
            raise ValueError("attitude gains must be nonnegative")
        if self.max_thrust <= 0.0:
            raise ValueError("max_thrust must be positive")


def attitude_wrench(
    euler: np.ndarray,
    euler_rates: np.ndarray,
    euler_ref: np.ndarray,
    gains: AttitudeGains,
) -> np.ndarray:
    """Moment demand (roll, pitch, yaw): kp * error - kd * rates."""
    return gains.kp * (np.asarray(euler_ref) - np.asarray(euler)) - gains.kd * np.asarray(
        euler_rates
    )


def moment_map(params: ModelParams) -> np.ndarray:
    """3x4 map from fan thrusts to body moment; column i is p_i x z_hat."""
    p = params.thruster_offsets
    A = np.zeros((3, 4))
    A[0] = p[:, 1]
    A[1] = -p[:, 0]
    return A


def allocate_thrusts(
    moment_demand: np.ndarray, params: ModelParams, max_thrust: float | None = None
) -> tuple[np.ndarray, float]:
    """Least-squares thrust allocation clamped to [0, max].

    Returns (thrusts (4,), yaw_residual). The minimum-norm solution reproduces
    any feasible roll/pitch demand exactly; clamping degrades infeasible
    demands gracefully. Yaw demand is structurally unreachable and reported.
    """
    limit = params.max_thrust if max_thrust is None else max_thrust
    demand = np.asarray(moment_demand, dtype=float)
    A = moment_map(params)
    f = np.linalg.pinv(A) @ demand
    return np.clip(f, 0.0, limit), float(demand[2])


class ThrustAllocator:
    """Precomputed allocation for the control loop (the map is state-independent)."""

    def __init__(self, params: ModelParams, max_thrust: float | None = None):
        self.limit = params.max_thrust if max_thrust is None else max_thrust
        self.pinv = np.linalg.pinv(moment_map(params))

    def __call__(self, moment_demand: np.ndarray) -> tuple[np.ndarray, float]:
        f = self.pinv @ moment_demand
        return np.clip(f, 0.0, self.limit), float(moment_demand[2])

"""Explicit reference governor for the applied body-velocity reference.

The governor predicts the two stance-foot ground reaction forces from a
static point-mass (triangular inverted pendulum) balance, measures the margin
to the friction-pyramid constraint, and moves the applied reference toward
the desired one at a rate proportional to that margin. No optimization is
involved: the update is a normalized attraction field scaled by a clamped
safety measure, so a vanishing margin freezes the applied reference and the
constraint-admissible set is never left once entered.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .dynamics import ModelParams, RobotState, Wrench


@dataclass
class FrictionConstraint:
    """Per-foot friction pyramid |u_x| <= mu u_z, |u_y| <= mu u_z, u_z >= min."""

    mu: float = 0.25
    min_normal: float = 5.0

    def validate(self) -> None:
        if self.mu <= 0.0 or self.min_normal < 0.0:
            raise ValueError("need mu > 0 and min_normal >= 0")

    def pyramid_rows(self, u_g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Constraint rows (J, d) at the given force, with J u_g + d >= 0 the
        admissibility condition (sign rows linearize the absolute values)."""
        J = np.array(
            [
                [-np.sign(u_g[0]), 0.0, self.mu],
                [0.0, -np.sign(u_g[1]), self.mu],
                [0.0, 0.0, 1.0],
            ]
        )
        d = np.array([0.0, 0.0, -self.min_normal])
        return J, d


def constraint_margin(u_g: np.ndarray, constraint: FrictionConstraint) -> float:
    """Smallest slack across the pyramid rows for one foot force (negative = violated)."""
    ux, uy, uz = u_g
    return float(
        min(
            constraint.mu * uz - abs(ux),
            constraint.mu * uz - abs(uy),
            uz - constraint.min_normal,
        )
    )


@dataclass
class ErgParams:
    """Update-law constants; all config-exposed."""

    kappa: float = 2.0          # attraction rate [(m/s)/s at full margin]
    margin_scale: float = 10.0  # margin [N] that saturates the safety measure
    eta: float = 1e-6           # attraction-field normalization floor
    t_horizon: float = 0.2      # velocity-error-to-acceleration horizon [s]


@dataclass
class ErgState:
    """Desired reference, applied (filtered) reference, and the last margin."""

    x_r: np.ndarray
    x_w: np.ndarray
    last_margin: float = 0.0


class SingularPrediction(RuntimeError):
    """Stance geometry makes the static force system singular."""


def predicted_grf(
    state: RobotState,
    stance_points: np.ndarray,
    u_t: Wrench,
    v_cmd: np.ndarray,
    params: ModelParams,
    t_horizon: float = 0.2,
) -> tuple[np.ndarray, np.ndarray]:
    """Predict the two stance GRFs for a candidate velocity command.

    Solves the 6x6 static system: point-mass force balance with the commanded
    acceleration (v_cmd - v) / t_horizon, moment balance about the COM in the
    two directions perpendicular to the support line (including the thruster
    moment), and an even force split along the support line. The moment about
    the support line itself is not controllable by two contact points and is
    left out of the system.

    Raises SingularPrediction when the stance points coincide or the system
    is numerically singular.
    """
    p1x, p1y, p1z = (float(v) for v in stance_points[0])
    p2x, p2y, p2z = (float(v) for v in stance_points[1])
    dx, dy, dz = p1x - p2x, p1y - p2y, p1z - p2z
    span = sqrt(dx * dx + dy * dy + dz * dz)
    if span < 1e-9:
        raise SingularPrediction("stance points coincide")
    dx, dy, dz = dx / span, dy / span, dz / span

    # orthonormal pair perpendicular to the support direction
    if abs(dz) < 0.99:
        e1x, e1y, e1z = dy, -dx, 0.0  # d x z_hat
    else:
        e1x, e1y, e1z = 0.0, dz, -dy  # d x x_hat
    n = sqrt(e1x * e1x + e1y * e1y + e1z * e1z)
    e1x, e1y, e1z = e1x / n, e1y / n, e1z / n
    e2x = dy * e1z - dz * e1y
    e2y = dz * e1x - dx * e1z
    e2z = dx * e1y - dy * e1x

    R = state.pose.rotation
    com = state.pose.position
    m = params.mass
    acc_des = (np.asarray(v_cmd, dtype=float) - state.twist.linear) / t_horizon
    f_req = m * acc_des - m * params.gravity - u_t.force_world(R)
    mt = u_t.moment_world(R)

    # In the orthonormal basis (d, e1, e2) the six balance equations decouple:
    # writing u_12 = F/2 +/- delta with delta perpendicular to d, the moment
    # balance about e1/e2 fixes the two components of delta directly
    # (d x e1 = e2, d x e2 = -e1), so no linear solve is needed.
    f0, f1, f2 = f_req.tolist()
    mt0, mt1, mt2 = mt.tolist()
    cx = 0.5 * (p1x + p2x) - com[0]
    cy_ = 0.5 * (p1y + p2y) - com[1]
    cz = 0.5 * (p1z + p2z) - com[2]
    half = 0.5 * span
    # m_t + c x F, the moment the foot-force difference must cancel
    mx = mt0 + cy_ * f2 - cz * f1
    my = mt1 + cz * f0 - cx * f2
    mz = mt2 + cx * f1 - cy_ * f0
    delta1 = -(e2x * mx + e2y * my + e2z * mz) / (2.0 * half)
    delta2 = (e1x * mx + e1y * my + e1z * mz) / (2.0 * half)
    ddx = delta1 * e1x + delta2 * e2x
    ddy = delta1 * e1y + delta2 * e2y
    ddz = delta1 * e1z + delta2 * e2z
    u1 = np.array([0.5 * f0 + ddx, 0.5 * f1 + ddy, 0.5 * f2 + ddz])
    u2 = np.array([0.5 * f0 - ddx, 0.5 * f1 - ddy, 0.5 * f2 - ddz])
    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(u2))):
        raise SingularPrediction("non-finite prediction")
    return u1, u2


def governor_update(
    erg: ErgState, margin: float, dt: float, params: ErgParams | None = None
) -> ErgState:
    """Move the applied reference toward the desired one, gated by the margin.

    dx_w/dt = kappa * clamp(margin / margin_scale, 0, 1) * rho with rho the
    normalized attraction field; the step never overshoots the desired
    reference. A non-positive margin freezes x_w.
    """
    p = params or ErgParams()
    diff = erg.x_r - erg.x_w
    dist = float(np.linalg.norm(diff))
    if dist == 0.0:
        return ErgState(erg.x_r.copy(), erg.x_w.copy(), margin)
    delta = float(np.clip(margin / p.margin_scale, 0.0, 1.0))
    rho = diff / max(dist, p.eta)
    step = p.kappa * delta * dt * rho
    step_len = float(np.linalg.norm(step))
    if step_len >= dist:
        x_w = erg.x_r.copy()
    else:
        x_w = erg.x_w + step
    return ErgState(erg.x_r.copy(), x_w, margin)


class ReferenceGovernor:
    """Stateful wrapper stepped once per control tick by the simulation loop."""

    def __init__(
        self,
        desired_velocity: np.ndarray,
        constraint: FrictionConstraint,
        params: ErgParams | None = None,
        initial_applied: np.ndarray | None = None,
    ):
        x_r = np.asarray(desired_velocity, dtype=float).copy()
        x_w = np.zeros(3) if initial_applied is None else np.asarray(initial_applied, float).copy()
        self.state = ErgState(x_r=x_r, x_w=x_w)
        self.constraint = constraint
        self.params = params or ErgParams()
        self.last_prediction: tuple[np.ndarray, np.ndarray] | None = None
        self.prediction_faults = 0

    @property
    def applied(self) -> np.ndarray:
        return self.state.x_w

    def step(
        self,
        state: RobotState,
        stance_points: np.ndarray,
        u_t: Wrench,
        model: ModelParams,
        dt: float,
    ) -> tuple[np.ndarray, float]:
        """Predict, measure the margin at the current applied reference, update.

        On a singular stance geometry the last valid prediction is held and
        the applied reference is left untouched for this tick.
        """
        try:
            u1, u2 = predicted_grf(
                state, stance_points, u_t, self.state.x_w, model, self.params.t_horizon
            )
            self.last_prediction = (u1, u2)
        except SingularPrediction:
            self.prediction_faults += 1
            if self.last_prediction is None:
                return self.state.x_w.copy(), self.state.last_margin
            u1, u2 = self.last_prediction

        margin = min(
            constraint_margin(u1, self.constraint), constraint_margin(u2, self.constraint)
        )
        self.state = governor_update(self.state, margin, dt, self.params)
        return self.state.x_w.copy(), margin

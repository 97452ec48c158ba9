"""Fixed-step classical Runge-Kutta integration."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .so3 import orthonormalize


def rk4_step(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step; the derivative may not depend on time explicitly
    (controls are zero-order held across substeps by construction)."""
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def renormalize_rotation(x: np.ndarray) -> np.ndarray:
    """Project the rotation block of a flattened robot state back onto SO(3).

    Linear integration drifts the matrix off the rotation group; the per-step
    defect is tiny (one RK4 step stays O(dt^5) from orthogonal), so a single
    Newton step of the polar iteration R (3I - R^T R) / 2 already lands on the
    polar factor at rounding level. The exact SVD projection backs it up if
    the defect is ever large.
    """
    x = x.copy()
    R = x[3:12].reshape(3, 3)
    E = R.T @ R
    E[0, 0] -= 3.0
    E[1, 1] -= 3.0
    E[2, 2] -= 3.0
    Rn = R @ E * -0.5
    D = Rn.T @ Rn
    defect = abs(D[0, 0] - 1) + abs(D[1, 1] - 1) + abs(D[2, 2] - 1) + abs(D[0, 1]) + abs(D[0, 2]) + abs(D[1, 2])
    if defect > 1e-12:
        Rn = orthonormalize(R)
    x[3:12] = Rn.reshape(-1)
    return x

"""Rotation-matrix utilities: elementary rotations, skew maps, re-orthonormalization,
and Z-Y-X Euler angle extraction with explicit singularity faulting."""

from __future__ import annotations

import numpy as np


class EulerSingularityError(RuntimeError):
    """Pitch is at (or numerically on top of) +/- pi/2, so roll/yaw are undefined."""


def rot_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix [v]x such that skew(v) @ w == cross(v, w)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def orthonormalize(R: np.ndarray) -> np.ndarray:
    """Project a near-rotation onto SO(3) (polar decomposition via SVD).

    Returns the closest rotation in the Frobenius sense; used after each
    integrator step to kill the drift a linear integrator puts into R.
    """
    U, _, Vt = np.linalg.svd(R)
    Q = U @ Vt
    if np.linalg.det(Q) < 0.0:
        # flip the weakest axis so the result is a proper rotation
        U[:, -1] = -U[:, -1]
        Q = U @ Vt
    return Q


def rotation_defect(R: np.ndarray) -> float:
    """Frobenius norm of R^T R - I (0 for a perfect rotation)."""
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def euler_zyx_from_matrix(R: np.ndarray, singular_tol: float = 1e-6) -> np.ndarray:
    """Extract (roll, pitch, yaw) with R = Rz(yaw) @ Ry(pitch) @ Rx(roll).

    Raises EulerSingularityError when |pitch| is within singular_tol of pi/2;
    callers treat that as a simulation fault instead of wrapping angles.
    """
    s_pitch = -R[2, 0]
    if abs(s_pitch) >= 1.0 - singular_tol:
        raise EulerSingularityError(f"pitch at +/-pi/2 (sin pitch = {s_pitch:.6f})")
    pitch = np.arcsin(s_pitch)
    roll = np.arctan2(R[2, 1], R[2, 2])
    yaw = np.arctan2(R[1, 0], R[0, 0])
    return np.array([roll, pitch, yaw])


def euler_zyx_to_matrix(euler: np.ndarray) -> np.ndarray:
    roll, pitch, yaw = euler
    return rot_z(yaw) @ rot_y(pitch) @ rot_x(roll)


def euler_rates_from_omega(euler: np.ndarray, omega_body: np.ndarray) -> np.ndarray:
    """Map body angular velocity to Z-Y-X Euler angle rates at the given attitude.

    Inverse of omega_b = E(euler) @ euler_rates; singular with the same pitch
    condition as the extraction above.
    """
    roll, pitch, _ = euler
    cr, sr = np.cos(roll), np.sin(roll)
    cp = np.cos(pitch)
    if abs(cp) < 1e-9:
        raise EulerSingularityError("euler rate map singular at |pitch| = pi/2")
    tp = np.tan(pitch)
    T = np.array(
        [
            [1.0, sr * tp, cr * tp],
            [0.0, cr, -sr],
            [0.0, sr / cp, cr / cp],
        ]
    )
    return T @ omega_body


def yaw_rotation(R: np.ndarray) -> np.ndarray:
    """Heading-only rotation Rz(yaw) of a body attitude (no singular pitch guard)."""
    yaw = np.arctan2(R[1, 0], R[0, 0])
    return rot_z(yaw)

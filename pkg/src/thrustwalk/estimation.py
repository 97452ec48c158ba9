"""Two competing ground-reaction-force estimators.

Conjugate momentum observer: integrates a residual feedback loop on the
generalized momentum so the residual converges (first-order, per-axis rate
K_O) to whatever generalized force the model does not explain, i.e. the
contact wrench. Needs no acceleration measurement and no mass-matrix
inversion; the mass-matrix rate is obtained by backward differencing so the
implementation stays model-generic even though it is identically zero here.

Constrained-model estimate: assumes the stance feet are pinned (J dv +
dJ v = 0) and solves for the contact-space forces through the Moore-Penrose
pseudo-inverse of the Delassus matrix J M^-1 J^T. In two-point stance that
matrix is rank deficient, which is exactly the failure mode the observer
comparison is meant to expose; rank diagnostics are recorded on every call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import RobotState

PINV_CUTOFF = 1e-8  # singular values below cutoff * sigma_max are treated as zero


@dataclass
class ObserverState:
    """Residual, integral accumulator, and the samples backing the numeric
    mass-matrix rate and the trapezoidal integral."""

    gain: np.ndarray                 # (6,) diagonal of K_O
    r: np.ndarray                    # (6,) residual = generalized GRF estimate
    accumulator: np.ndarray          # (6,) running integral of (r - beta + u_t)
    p0: np.ndarray                   # (6,) initial generalized momentum
    sample_time: float
    M_prev: np.ndarray | None = None
    beta_prev: np.ndarray | None = None
    u_prev: np.ndarray | None = None

    def validate(self) -> None:
        if np.any(self.gain <= 0.0):
            raise ValueError("observer gains must be positive")
        if not np.all(np.isfinite(self.accumulator)):
            raise ValueError("accumulator has non-finite entries")


def make_observer(
    gain: np.ndarray | float, v0: np.ndarray, M: np.ndarray, sample_time: float
) -> ObserverState:
    """Fresh observer with zero residual and the initial momentum recorded."""
    g = np.full(6, float(gain)) if np.isscalar(gain) else np.asarray(gain, dtype=float).copy()
    obs = ObserverState(
        gain=g,
        r=np.zeros(6),
        accumulator=np.zeros(6),
        p0=M @ np.asarray(v0, dtype=float),
        sample_time=sample_time,
        M_prev=np.asarray(M, dtype=float).copy(),
    )
    obs.validate()
    return obs


def numeric_mass_matrix_rate(M_k: np.ndarray, M_km1: np.ndarray, T_s: float) -> np.ndarray:
    """Backward difference (M_k - M_{k-1}) / T_s."""
    if T_s <= 0.0:
        raise ValueError("sample time must be positive")
    return (np.asarray(M_k, dtype=float) - np.asarray(M_km1, dtype=float)) / T_s


def observer_step(
    obs: ObserverState,
    v: np.ndarray,
    u_t_gen: np.ndarray,
    h: np.ndarray,
    M: np.ndarray,
    dt: float,
) -> ObserverState:
    """Advance the residual one sample: r = K_O (p - p0 - integral(r - beta + u_t)).

    The integral is trapezoidal in r and beta and rectangular in u_t (the
    input is zero-order held over the interval). Because the loop is linear
    in the new residual, the trapezoidal step is solved implicitly, which
    keeps the discrete response on the exact first-order pole map.
    """
    v = np.asarray(v, dtype=float)
    M = np.asarray(M, dtype=float)
    p = M @ v

    M_prev = M if obs.M_prev is None else obs.M_prev
    M_rate = numeric_mass_matrix_rate(M, M_prev, dt)
    beta = np.asarray(h, dtype=float) - M_rate @ v

    beta_prev = beta if obs.beta_prev is None else obs.beta_prev
    # explicit part of the trapezoid (old residual, both beta samples, held input)
    partial = obs.accumulator + dt * (
        0.5 * obs.r - 0.5 * (beta + beta_prev) + np.asarray(u_t_gen, dtype=float)
    )
    half_gain_dt = 0.5 * obs.gain * dt
    r_new = obs.gain * (p - obs.p0 - partial) / (1.0 + half_gain_dt)
    accumulator = partial + 0.5 * dt * r_new

    return ObserverState(
        gain=obs.gain,
        r=r_new,
        accumulator=accumulator,
        p0=obs.p0,
        sample_time=dt,
        M_prev=M.copy(),
        beta_prev=beta,
        u_prev=np.asarray(u_t_gen, dtype=float).copy(),
    )


def per_foot_forces(r: np.ndarray, jacobians: list[np.ndarray]) -> np.ndarray:
    """Split a generalized contact-force estimate across the stance feet.

    Minimum-norm solve of stack(B_i^T) lam = r; with two stance feet the
    stacked map is rank deficient (an internal squeeze force along the foot
    line is unobservable) and the pseudo-inverse picks the squeeze-free
    solution. Returns (k, 3) world-frame foot forces; empty for no feet.
    """
    if not jacobians:
        return np.zeros((0, 3))
    stacked = np.hstack([B.T for B in jacobians])  # 6 x 3k
    # min-norm least squares via S^+ = S^T (S S^T)^+, with the Gram matrix
    # pseudo-inverted by eigendecomposition (it is symmetric PSD); the cutoff
    # is squared because Gram eigenvalues are squared singular values
    G = stacked @ stacked.T
    w_eig, Q = np.linalg.eigh(G)
    keep = w_eig > (PINV_CUTOFF**2) * max(float(w_eig[-1]), 0.0)
    inv_w = np.where(keep, 1.0 / np.where(keep, w_eig, 1.0), 0.0)
    lam = stacked.T @ (Q @ (inv_w * (Q.T @ np.asarray(r, dtype=float))))
    return lam.reshape(len(jacobians), 3)


@dataclass
class ConstrainedEstimate:
    """Stacked contact forces from the pinned-feet model plus rank diagnostics."""

    forces: np.ndarray            # (k, 3) per stance foot
    rank: int
    singular_values: np.ndarray
    generalized: np.ndarray = field(default_factory=lambda: np.zeros(6))

    @property
    def empty(self) -> bool:
        return self.forces.shape[0] == 0


def constrained_grf(
    state: RobotState,
    u_t_gen: np.ndarray,
    h: np.ndarray,
    M: np.ndarray,
    jacobians: list[np.ndarray],
    jacobian_rates: list[np.ndarray] | None = None,
    M_inv: np.ndarray | None = None,
) -> ConstrainedEstimate:
    """Contact forces from the pinned-feet constraint J dv + dJ v = 0.

    lam = (J M^-1 J^T)^+ (J M^-1 (h - u_t) - dJ v); the Delassus matrix is
    pseudo-inverted with a relative singular-value cutoff and its rank is
    recorded. Empty stance returns an empty estimate. Pass a precomputed
    M_inv to skip the factorizations when M is constant.
    """
    if not jacobians:
        return ConstrainedEstimate(np.zeros((0, 3)), 0, np.zeros(0))

    J = np.vstack(jacobians)  # 3k x 6
    v = state.twist.as_vector()
    if M_inv is None:
        M_inv = np.linalg.inv(np.asarray(M, dtype=float))
    J_Minv = J @ M_inv
    delassus = J_Minv @ J.T

    rhs = J_Minv @ (np.asarray(h, dtype=float) - np.asarray(u_t_gen, dtype=float))
    if jacobian_rates is not None:
        rhs -= np.vstack(jacobian_rates) @ v

    # Delassus is symmetric PSD, so its eigendecomposition is its SVD
    w_eig, Q = np.linalg.eigh(delassus)
    s = np.abs(w_eig[::-1])
    keep = w_eig > PINV_CUTOFF * max(float(w_eig[-1]), 0.0)
    inv_s = np.where(keep, 1.0 / np.where(keep, w_eig, 1.0), 0.0)
    lam = Q @ (inv_s * (Q.T @ rhs))

    return ConstrainedEstimate(
        forces=lam.reshape(len(jacobians), 3),
        rank=int(keep.sum()),
        singular_values=s,
        generalized=J.T @ lam,
    )

"""Finite-horizon LQ subproblem: descent directions and tracking gains.

Both operations run a backward differential Riccati sweep along the current
trajectory using the same 4th-order one-step scheme as the dynamics
integrator, with the time-varying coefficients interpolated linearly
between grid samples.  ``P`` is re-symmetrized after every step to suppress
round-off drift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import LinearizedDynamics
from .errors import RiccatiDivergenceError

#: abort threshold for the Riccati sweep
DEFAULT_P_BOUND = 1e8


@dataclass(frozen=True)
class RiccatiSolution:
    """Backward sweep output: value matrix ``P`` and affine co-state ``s``."""

    t: np.ndarray
    P: np.ndarray  # (S, n, n), symmetric PSD
    s: np.ndarray  # (S, n)


@dataclass(frozen=True)
class TangentDirection:
    """State/control direction ``zeta = (z, v)`` on the trajectory grid."""

    z: np.ndarray  # (S, n)
    v: np.ndarray  # (S, m)

    def scaled(self, gamma: float) -> "TangentDirection":
        return TangentDirection(gamma * self.z, gamma * self.v)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.z**2) + np.sum(self.v**2)))


def _riccati_rhs(P, s, A, B, Q, R_inv, a, b):
    """Continuous-time RHS of the coupled (P, s) backward equations."""
    G = B @ R_inv @ B.T
    GP = G @ P
    dP = -(A.T @ P + P @ A) + P @ GP - Q
    if s is None:
        return dP, None
    ds = -(A - GP).T @ s + P @ (B @ (R_inv @ b)) - a
    return dP, ds


def _backward_sweep(lin: LinearizedDynamics, Q, R_inv, P_terminal, a=None, b=None,
                    p_bound=DEFAULT_P_BOUND):
    """Integrate the Riccati (and optional affine) equations from T down to 0."""
    S = lin.n_samples
    dt = lin.dt
    n = lin.A.shape[1]
    affine = a is not None
    P_out = np.empty((S, n, n))
    s_out = np.zeros((S, n)) if affine else None
    P = np.asarray(P_terminal, dtype=float).copy()
    s = np.zeros(n) if affine else None
    P_out[-1] = P

    A_mid = 0.5 * (lin.A[:-1] + lin.A[1:])
    B_mid = 0.5 * (lin.B[:-1] + lin.B[1:])
    if affine:
        a_mid = 0.5 * (a[:-1] + a[1:])
        b_mid = 0.5 * (b[:-1] + b[1:])

    h = -dt
    for i in range(S - 2, -1, -1):
        stage_1 = (lin.A[i + 1], lin.B[i + 1]) + ((a[i + 1], b[i + 1]) if affine else (None, None))
        stage_m = (A_mid[i], B_mid[i]) + ((a_mid[i], b_mid[i]) if affine else (None, None))
        stage_0 = (lin.A[i], lin.B[i]) + ((a[i], b[i]) if affine else (None, None))

        k1P, k1s = _riccati_rhs(P, s, stage_1[0], stage_1[1], Q, R_inv, stage_1[2], stage_1[3])
        k2P, k2s = _riccati_rhs(
            P + 0.5 * h * k1P, None if not affine else s + 0.5 * h * k1s,
            stage_m[0], stage_m[1], Q, R_inv, stage_m[2], stage_m[3])
        k3P, k3s = _riccati_rhs(
            P + 0.5 * h * k2P, None if not affine else s + 0.5 * h * k2s,
            stage_m[0], stage_m[1], Q, R_inv, stage_m[2], stage_m[3])
        k4P, k4s = _riccati_rhs(
            P + h * k3P, None if not affine else s + h * k3s,
            stage_0[0], stage_0[1], Q, R_inv, stage_0[2], stage_0[3])

        P = P + (h / 6.0) * (k1P + 2.0 * k2P + 2.0 * k3P + k4P)
        P = 0.5 * (P + P.T)
        if not np.isfinite(P).all() or np.linalg.norm(P) > p_bound:
            raise RiccatiDivergenceError(
                f"Riccati sweep exceeded bound {p_bound:g} at t = {lin.t[i]:.6g}")
        P_out[i] = P
        if affine:
            s = s + (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
            s_out[i] = s
    return P_out, s_out


def descent_direction(a, b, lin: LinearizedDynamics, Q_n, R_n, P_1n,
                      p_bound=DEFAULT_P_BOUND) -> TangentDirection:
    """Minimizer of the local quadratic model over the tangent space.

    Solves ``min integral(a.z + b.v + 0.5|z|^2_Qn + 0.5|v|^2_Rn) +
    0.5|z(T)|^2_P1n`` subject to ``dz/dt = A z + B v`` and ``z(0) = 0``
    through the backward (P, s) sweep followed by a forward pass with
    ``v = -R_n^{-1} (B'P z + B's + b)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    R_inv = np.linalg.inv(np.asarray(R_n, dtype=float))
    P, s = _backward_sweep(lin, np.asarray(Q_n, dtype=float), R_inv,
                           np.asarray(P_1n, dtype=float), a, b, p_bound)

    S = lin.n_samples
    dt = lin.dt
    n = lin.A.shape[1]
    z = np.zeros((S, n))

    A_mid = 0.5 * (lin.A[:-1] + lin.A[1:])
    B_mid = 0.5 * (lin.B[:-1] + lin.B[1:])
    P_mid = 0.5 * (P[:-1] + P[1:])
    s_mid = 0.5 * (s[:-1] + s[1:])
    b_mid = 0.5 * (b[:-1] + b[1:])

    def rhs(zz, A, B, PP, ss, bb):
        v = -R_inv @ (B.T @ (PP @ zz + ss) + bb)
        return A @ zz + B @ v

    for i in range(S - 1):
        k1 = rhs(z[i], lin.A[i], lin.B[i], P[i], s[i], b[i])
        k2 = rhs(z[i] + 0.5 * dt * k1, A_mid[i], B_mid[i], P_mid[i], s_mid[i], b_mid[i])
        k3 = rhs(z[i] + 0.5 * dt * k2, A_mid[i], B_mid[i], P_mid[i], s_mid[i], b_mid[i])
        k4 = rhs(z[i] + dt * k3, lin.A[i + 1], lin.B[i + 1], P[i + 1], s[i + 1], b[i + 1])
        z[i + 1] = z[i] + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    # grid controls from the stationarity condition at the samples
    v = -(np.einsum("snm,sn->sm", lin.B, np.einsum("snk,sk->sn", P, z) + s) + b) @ R_inv
    return TangentDirection(z, v)


def lqr_gain(lin: LinearizedDynamics, Q_lqr, R_lqr, p_bound=DEFAULT_P_BOUND) -> np.ndarray:
    """Finite-horizon LQR gain schedule ``K(t_i) = R^{-1} B(t_i)' P(t_i)``.

    The backward sweep starts from the terminal condition ``P(T) = Q_lqr``.
    """
    R_inv = np.linalg.inv(np.asarray(R_lqr, dtype=float))
    P, _ = _backward_sweep(lin, np.asarray(Q_lqr, dtype=float), R_inv,
                           np.asarray(Q_lqr, dtype=float), None, None, p_bound)
    return np.einsum("mk,snk,snj->smj", R_inv, lin.B, P)

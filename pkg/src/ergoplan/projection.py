"""Projection of planning trajectories onto the feasible manifold.

The projection is a trajectory tracking controller: an LQR gain schedule is
synthesized around the planning pair ``(alpha, mu)`` and the dynamics are
integrated under ``u = mu + K (alpha - x)`` from ``x(0) = alpha(0)``.

Each step solves the small implicit system coupling ``u(t_{i+1})`` to
``x(t_{i+1})`` by fixed-point iteration, so the stored samples satisfy the
grid integrator exactly: projected trajectories have machine-zero
integration defect and the projection is idempotent on feasible inputs.
"""

from __future__ import annotations

import numpy as np

from .dynamics import FEASIBLE, Trajectory, linearize_trajectory, rk4_step
from .errors import ProjectionDivergenceError
from .lq_solver import lqr_gain

#: abort threshold on the tracked state norm
DEFAULT_STATE_BOUND = 1e3

_FIXED_POINT_TOL = 1e-14
_FIXED_POINT_MAX_ITERS = 25


def project(xi: Trajectory, weights, state_bound: float = DEFAULT_STATE_BOUND) -> Trajectory:
    """Map a planning trajectory to the closest feasible one.

    The gain schedule comes from :func:`ergoplan.lq_solver.lqr_gain` applied
    to the linearization around the input pair, weighted by ``Q_lqr`` and
    ``R_lqr``.  Feasible inputs are fixed points: they are returned
    unchanged up to the fixed-point tolerance.
    """
    alpha = xi.x
    mu = xi.u
    K = lqr_gain(linearize_trajectory(xi), weights.Q_lqr, weights.R_lqr)

    S = xi.n_samples
    dt = xi.dt
    x = np.empty_like(alpha)
    u = np.empty_like(mu)
    x[0] = alpha[0]
    u[0] = mu[0] + K[0] @ (alpha[0] - x[0])

    for i in range(S - 1):
        u_next = mu[i + 1] + K[i + 1] @ (alpha[i + 1] - x[i])
        for _ in range(_FIXED_POINT_MAX_ITERS):
            x_next = rk4_step(x[i], u[i], u_next, dt)
            u_new = mu[i + 1] + K[i + 1] @ (alpha[i + 1] - x_next)
            delta = np.max(np.abs(u_new - u_next))
            u_next = u_new
            if delta < _FIXED_POINT_TOL:
                break
        # final state consistent with the stored control sample
        x_next = rk4_step(x[i], u[i], u_next, dt)
        if not np.isfinite(x_next).all() or np.linalg.norm(x_next) > state_bound:
            raise ProjectionDivergenceError(
                f"tracking integration exceeded bound {state_bound:g} at t = {xi.t[i + 1]:.6g}")
        x[i + 1] = x_next
        u[i + 1] = u_next

    return Trajectory(xi.t, x, u, kind=FEASIBLE)

"""Unicycle motion model, trajectory containers and RK4 integration.

The agent state is ``(X, Y, theta)`` and the control is ``(nu, omega)``:
forward speed and heading rate.  Controls are sampled on the same uniform
grid as the states and interpolated linearly inside each integration step
(first-order hold), so a trajectory is fully determined by its samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STATE_DIM = 3
CONTROL_DIM = 2

FEASIBLE = "feasible"
PLANNING = "planning"

#: max admissible one-step integration defect for a `feasible` trajectory
DEFECT_TOL = 1e-8


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Trajectory:
    """State/control signal pair on a uniform time grid.

    Attributes
    ----------
    t : (S,) sample times, ``t[0] = 0``, uniform spacing.
    x : (S, n) state samples.
    u : (S, m) control samples, linearly interpolated between grid points.
    kind : ``"feasible"`` when ``x`` is the integrator output for ``u``,
        ``"planning"`` otherwise (candidate pairs and averaged estimates).

    Arrays are stored read-only so trajectories can be shared between
    agent views without copies.
    """

    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    kind: str = PLANNING

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen_array(self.t))
        object.__setattr__(self, "x", _frozen_array(self.x))
        object.__setattr__(self, "u", _frozen_array(self.u))
        if self.t.ndim != 1 or len(self.t) < 2:
            raise ValueError("trajectory needs at least two time samples")
        if len(self.x) != len(self.t) or len(self.u) != len(self.t):
            raise ValueError("state and control arrays must match the time grid")
        steps = np.diff(self.t)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12) or steps[0] <= 0:
            raise ValueError("time grid must be uniform and increasing")
        if self.kind not in (FEASIBLE, PLANNING):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")

    @property
    def horizon(self) -> float:
        return float(self.t[-1])

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def n_samples(self) -> int:
        return len(self.t)

    def replace(self, x=None, u=None, kind=None) -> "Trajectory":
        return Trajectory(
            self.t,
            self.x if x is None else x,
            self.u if u is None else u,
            self.kind if kind is None else kind,
        )


@dataclass(frozen=True)
class LinearizedDynamics:
    """Jacobians ``A(t_i) = df/dx`` and ``B(t_i) = df/du`` on the trajectory grid."""

    t: np.ndarray
    A: np.ndarray  # (S, n, n)
    B: np.ndarray  # (S, n, m)

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen_array(self.t))
        object.__setattr__(self, "A", _frozen_array(self.A))
        object.__setattr__(self, "B", _frozen_array(self.B))
        if not (len(self.t) == len(self.A) == len(self.B)):
            raise ValueError("Jacobian arrays must match the time grid")

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def n_samples(self) -> int:
        return len(self.t)


def flow(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """State derivative ``(nu cos theta, nu sin theta, omega)``.

    Broadcasts over leading axes, so batches of samples evaluate in one call.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    theta = x[..., 2]
    nu = u[..., 0]
    return np.stack([nu * np.cos(theta), nu * np.sin(theta), u[..., 1]], axis=-1)


def linearize(x: np.ndarray, u: np.ndarray):
    """Jacobians of :func:`flow` at a single state/control sample."""
    theta = float(x[2])
    nu = float(u[0])
    A = np.zeros((STATE_DIM, STATE_DIM))
    A[0, 2] = -nu * np.sin(theta)
    A[1, 2] = nu * np.cos(theta)
    B = np.array([[np.cos(theta), 0.0], [np.sin(theta), 0.0], [0.0, 1.0]])
    return A, B


def linearize_trajectory(traj: Trajectory) -> LinearizedDynamics:
    """Jacobians along a trajectory, vectorized over the grid."""
    theta = traj.x[:, 2]
    nu = traj.u[:, 0]
    S = traj.n_samples
    A = np.zeros((S, STATE_DIM, STATE_DIM))
    A[:, 0, 2] = -nu * np.sin(theta)
    A[:, 1, 2] = nu * np.cos(theta)
    B = np.zeros((S, STATE_DIM, CONTROL_DIM))
    B[:, 0, 0] = np.cos(theta)
    B[:, 1, 0] = np.sin(theta)
    B[:, 2, 1] = 1.0
    return LinearizedDynamics(traj.t, A, B)


def rk4_step(x: np.ndarray, u0: np.ndarray, u1: np.ndarray, h: float) -> np.ndarray:
    """One classical Runge-Kutta step with the control interpolated linearly.

    ``u0`` and ``u1`` are the control samples at the ends of the step; the
    midpoint stages see their average.  Broadcasts over leading axes.
    """
    um = 0.5 * (np.asarray(u0) + np.asarray(u1))
    k1 = flow(x, u0)
    k2 = flow(x + 0.5 * h * k1, um)
    k3 = flow(x + 0.5 * h * k2, um)
    k4 = flow(x + h * k3, u1)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(x0: np.ndarray, controls: np.ndarray, horizon: float) -> Trajectory:
    """Integrate the dynamics under sampled controls into a feasible trajectory.

    ``controls`` holds one ``(nu, omega)`` row per grid point; the grid has
    ``len(controls)`` samples over ``[0, horizon]``.  The domain rectangle is
    not enforced here; excursions are discouraged by the cost, not clamped.
    """
    controls = np.asarray(controls, dtype=float)
    if controls.ndim != 2 or controls.shape[1] != CONTROL_DIM or len(controls) < 2:
        raise ValueError("controls must be an (S, 2) array with S >= 2")
    S = len(controls)
    t = np.linspace(0.0, float(horizon), S)
    h = t[1] - t[0]
    x = np.empty((S, STATE_DIM))
    x[0] = np.asarray(x0, dtype=float)
    for i in range(S - 1):
        x[i + 1] = rk4_step(x[i], controls[i], controls[i + 1], h)
    return Trajectory(t, x, controls, kind=FEASIBLE)


def integration_defect(traj: Trajectory) -> float:
    """Largest one-step defect ``|x(t_{i+1}) - step(x(t_i), u)|`` over the grid.

    A trajectory is feasible when this stays below :data:`DEFECT_TOL`.
    Each step is re-integrated independently from the stored samples, so the
    check is vectorized.
    """
    predicted = rk4_step(traj.x[:-1], traj.u[:-1], traj.u[1:], traj.dt)
    return float(np.max(np.linalg.norm(predicted - traj.x[1:], axis=-1)))


def is_feasible(traj: Trajectory, tol: float = DEFECT_TOL) -> bool:
    return integration_defect(traj) <= tol


def initial_circle(x0: np.ndarray, radius: float, horizon: float, n_steps: int) -> Trajectory:
    """Feasible circular trajectory: one full revolution tangent to the heading.

    Constant controls ``omega = 2 pi / horizon`` and ``nu = omega * radius``
    trace a circle of the requested radius starting at ``x0``.
    """
    if radius <= 0:
        raise ValueError("circle radius must be positive")
    omega = 2.0 * np.pi / float(horizon)
    nu = omega * float(radius)
    controls = np.tile([nu, omega], (n_steps + 1, 1))
    return integrate(np.asarray(x0, dtype=float), controls, horizon)

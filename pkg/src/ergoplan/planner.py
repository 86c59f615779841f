"""Per-agent iteration: descent direction, Armijo step, projection.

Within a round every agent works Jacobi-style from the round-start views,
so results are independent of agent update order and reproducible.  The
line search evaluates the cost with the projected candidate substituted for
the agent's own entry; this keeps every accepted step a guaranteed decrease
of the local cost measured on feasible trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import PLANNING, Trajectory, linearize_trajectory
from .lq_solver import TangentDirection, descent_direction
from .objective import cost_gradients, directional_derivative, ergodic_metric, total_cost
from .basis import global_coefficients, trajectory_coefficients
from .projection import project

#: deepest Armijo backtracking exponent; beyond it the step is rejected
H_MAX = 1000

#: treat directional derivatives above this as "no descent available"
_DD_FLOOR = -1e-15


@dataclass(frozen=True)
class AgentView:
    """One agent's local copy of the fleet state at a given round.

    ``trajectories[agent_id]`` is the agent's own feasible trajectory; the
    other entries are its current estimates (exact for neighbours, averaged
    hearsay otherwise).  ``done_flags`` collects the ids of agents known to
    have locally terminated.
    """

    agent_id: int
    round_index: int
    trajectories: tuple
    local_done: bool = False
    done_flags: frozenset = field(default_factory=frozenset)
    initial_metric: float | None = None
    last_metric: float | None = None

    def __post_init__(self):
        if not 0 <= self.agent_id < len(self.trajectories):
            raise ValueError("agent id must index the trajectory estimates")

    @property
    def own(self) -> Trajectory:
        return self.trajectories[self.agent_id]

    @property
    def n_agents(self) -> int:
        return len(self.trajectories)

    @property
    def local_reduction(self) -> float | None:
        """Local ergodic-reduction estimate in percent, when available."""
        if self.initial_metric is None or self.last_metric is None or self.initial_metric <= 0:
            return None
        return 100.0 * (self.initial_metric - self.last_metric) / self.initial_metric


@dataclass(frozen=True)
class IterationRecord:
    """One planner log row: what an agent did during a round."""

    round_index: int
    agent_id: int
    gamma: float  # NaN when the line search rejected the step
    directional_derivative: float
    local_cost: float
    local_metric: float


def step_candidate(traj: Trajectory, zeta: TangentDirection, gamma: float) -> Trajectory:
    """Planning pair ``xi + gamma * zeta``."""
    return Trajectory(traj.t, traj.x + gamma * zeta.z, traj.u + gamma * zeta.v, kind=PLANNING)


def armijo_step(xi: Trajectory, zeta: TangentDirection, local_cost, dd: float,
                rho: float, beta: float, h_max: int = H_MAX,
                baseline: float | None = None) -> float | None:
    """Backtracking step size ``gamma = beta**h`` satisfying the Armijo test.

    ``local_cost`` maps a candidate trajectory for this agent to the cost of
    the whole view with that candidate substituted.  Returns the first
    ``gamma`` with ``local_cost(xi + gamma zeta) - local_cost(xi) <= rho *
    gamma * dd``, or ``None`` when no ``h <= h_max`` qualifies.
    """
    if dd >= 0:
        raise ValueError("Armijo line search requires a descent direction (dd < 0)")
    j0 = local_cost(xi) if baseline is None else baseline
    for h in range(h_max + 1):
        gamma = beta**h
        if local_cost(step_candidate(xi, zeta, gamma)) - j0 <= rho * gamma * dd:
            return gamma
    return None


def local_ergodic_metric(view_trajectories, spectral, p_k) -> float:
    """Shared metric evaluated on the trajectories of one view."""
    coeffs = global_coefficients(
        [trajectory_coefficients(tr, spectral) for tr in view_trajectories])
    return ergodic_metric(coeffs, p_k, spectral)


def agent_iteration(view: AgentView, weights, spectral, p_k):
    """One planning round for one agent; returns ``(new_view, record)``.

    Computes the gradient signals and the LQ descent direction, line-searches
    the local cost over projected candidates, and stores the projected result
    as the agent's own trajectory.  A rejected or zero direction leaves the
    trajectory unchanged.
    """
    own = view.own
    trajs = list(view.trajectories)
    a, b = cost_gradients(view.agent_id, trajs, weights, spectral, p_k)
    zeta = descent_direction(a, b, linearize_trajectory(own),
                             weights.Q_n, weights.R_n, weights.P_1n)
    dd = directional_derivative(a, b, zeta.z, zeta.v, own.dt)

    new_own = own
    gamma = float("nan")
    if dd < _DD_FLOOR:
        baseline = total_cost(trajs, weights, spectral, p_k)
        projected = {}

        def local_cost(candidate: Trajectory) -> float:
            eta = project(candidate, weights)
            trial = list(trajs)
            trial[view.agent_id] = eta
            cost = total_cost(trial, weights, spectral, p_k)
            projected["last"] = (eta, cost)
            return cost

        gamma = armijo_step(own, zeta, local_cost, dd, weights.rho, weights.beta,
                            baseline=baseline)
        if gamma is None:
            gamma = float("nan")
        else:
            # the accepted candidate was evaluated last; reuse its projection
            new_own = projected["last"][0]

    trajs[view.agent_id] = new_own
    local_cost_after = total_cost(trajs, weights, spectral, p_k)
    metric_after = local_ergodic_metric(trajs, spectral, p_k)
    new_view = replace(view, trajectories=tuple(trajs), last_metric=metric_after)
    record = IterationRecord(view.round_index, view.agent_id, gamma, dd,
                             local_cost_after, metric_after)
    return new_view, record


def local_termination(view: AgentView, i_max: int, epsilon_r: float | None = None) -> bool:
    """Local stop test: iteration cap, or ergodic-reduction target when given."""
    if view.round_index >= i_max:
        return True
    if epsilon_r is not None:
        reduction = view.local_reduction
        if reduction is not None and reduction >= epsilon_r:
            return True
    return False

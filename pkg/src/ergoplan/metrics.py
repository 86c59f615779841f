"""Evaluation metrics computed from planned trajectories and round logs."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .basis import SpectralSet, basis_matrix
from .quadrature import cumulative_trapezoid, trapezoid_weights

SCHEMA_VERSION = 1


def ergodicity_curve(trajectories, spectral: SpectralSet, p_k):
    """Temporal ergodic metric over the whole grid in a single pass.

    Returns ``(times, values)`` starting at the first positive grid time:
    the time average over ``[0, t]`` is undefined at ``t = 0``, so the curve
    begins at ``t_1``.  Running basis integrals make the full curve as cheap
    as its final point.
    """
    trajs = list(trajectories)
    p_k = np.asarray(p_k, dtype=float)
    t = trajs[0].t
    dt = trajs[0].dt
    running = np.zeros((len(t), spectral.size))
    for tr in trajs:
        chi = spectral.domain.project_states(tr.x)
        running += cumulative_trapezoid(basis_matrix(spectral, chi), dt)
    coeffs = running[1:] / (len(trajs) * t[1:, None])
    diff = coeffs - p_k
    values = (diff * diff) @ spectral.lambda_k
    return t[1:].copy(), values


def temporal_ergodicity(trajectories, spectral: SpectralSet, p_k, t: float) -> float:
    """Curve value at one grid time ``t > 0``."""
    times, values = ergodicity_curve(trajectories, spectral, p_k)
    if not times[0] - 1e-12 <= t <= times[-1] + 1e-12:
        raise ValueError(f"t = {t} outside the curve range ({times[0]}, {times[-1]})")
    index = int(round((t - times[0]) / (times[1] - times[0]))) if len(times) > 1 else 0
    if abs(times[index] - t) > 1e-9:
        raise ValueError(f"t = {t} is not a grid time")
    return float(values[index])


def completion_task_time(times, values, epsilon_opt: float):
    """First grid time where the ergodicity drop reaches ``epsilon_opt`` percent.

    The reference level is the first curve sample (the ``t -> 0`` limit on
    the grid).  Returns ``None`` when the threshold is never reached.
    """
    if not 0.0 < epsilon_opt <= 100.0:
        raise ValueError("epsilon_opt must lie in (0, 100]")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    reference = values[0]
    reduction = 100.0 * (reference - values) / reference
    hits = np.nonzero(reduction >= epsilon_opt)[0]
    if len(hits) == 0:
        return None
    return float(times[hits[0]])


def _prefix_integral(samples, dt, t_end):
    """Trapezoid integral of scalar samples over ``[0, t_end]`` (grid time)."""
    index = int(round(t_end / dt))
    w = trapezoid_weights(index + 1, dt)
    return float(w @ samples[: index + 1])


def control_energy(traj, t_ctt: float | None) -> float:
    """Root control effort ``sqrt(integral |u|^2)`` up to the completion time.

    When the completion time was not reached, pass ``None`` to integrate
    over the full horizon (callers should flag this).
    """
    t_end = traj.horizon if t_ctt is None else t_ctt
    squared = np.sum(traj.u * traj.u, axis=1)
    return float(np.sqrt(_prefix_integral(squared, traj.dt, t_end)))


def traveled_distance(traj, t_ctt: float | None) -> float:
    """Path length ``integral |nu|`` up to the completion time."""
    t_end = traj.horizon if t_ctt is None else t_ctt
    return _prefix_integral(np.abs(traj.u[:, 0]), traj.dt, t_end)


def ergodic_reduction(e_initial: float, e_final: float) -> float:
    """Percentage drop of the ergodic metric; negative when it worsened."""
    if e_initial <= 0:
        raise ValueError("initial ergodic metric must be positive")
    return 100.0 * (e_initial - e_final) / e_initial


def optimality_curve(dd_per_round):
    """Normalized per-round optimality: ``max_j |dd|`` over the initial value.

    ``dd_per_round`` holds one sequence of per-agent directional derivatives
    per round; round 0 is the initial-trajectory value used for
    normalization.
    """
    maxima = np.array([np.max(np.abs(np.asarray(row, dtype=float))) for row in dd_per_round])
    if len(maxima) == 0:
        raise ValueError("need at least the initial round")
    if maxima[0] == 0:
        raise ValueError("initial directional derivative is zero; cannot normalize")
    return maxima / maxima[0]


@dataclass
class RunRecord:
    """Per-run metrics for persistence and batch statistics."""

    scenario: str
    seed: int
    n_agents: int
    epsilon_opt: float
    e_opt_times: list
    e_opt: list
    t_ctt: float | None
    t_ctt_reached: bool
    control_energy: list
    traveled_distance: list
    metrics_over_full_horizon: bool
    initial_metric: float
    final_metric: float
    ergodic_reduction: float
    optimality_curve: list
    rounds_optimized: int
    rounds_total: int
    graph_edges: list
    graph_diameter: int
    generator: str
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(**data)

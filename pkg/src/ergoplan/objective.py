"""Three-term planning cost and its first directional derivative.

The cost couples a shared ergodicity metric (weighted by ``q``), per-agent
control energy and a soft inter-agent proximity penalty.  The gradient
signals ``a`` (state) and ``b`` (control) returned here are the exact
derivatives of the discretized cost, so the directional derivative matches
finite differences of :func:`total_cost` to quadrature precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import SpectralSet, basis_gradients, global_coefficients, trajectory_coefficients
from .errors import ConfigError
from .quadrature import trapezoid_weights

_PSD_TOL = 1e-10


def _check_psd(name: str, matrix: np.ndarray):
    if not np.allclose(matrix, matrix.T):
        raise ConfigError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(matrix).min() < -_PSD_TOL:
        raise ConfigError(f"{name} must be positive semi-definite")


@dataclass
class CostWeights:
    """Tuning parameters for the cost, the quadratic model and the projector.

    ``r`` and ``W`` are the shared inter-agent penalty and distance
    transform; individual pairs can be overridden through ``r_pairs`` /
    ``W_pairs`` keyed by unordered agent-index pairs.
    """

    q: float
    R: np.ndarray
    r: float
    W: np.ndarray
    Q_n: np.ndarray
    R_n: np.ndarray
    P_1n: np.ndarray
    Q_lqr: np.ndarray
    R_lqr: np.ndarray
    rho: float = 1e-4
    beta: float = 0.99
    i_max: int = 70
    r_pairs: dict = field(default_factory=dict)
    W_pairs: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("R", "W", "Q_n", "R_n", "P_1n", "Q_lqr", "R_lqr"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.q <= 0:
            raise ConfigError("ergodicity weight q must be positive")
        if self.r <= 0:
            raise ConfigError("inter-agent penalty r must be positive")
        for name in ("R", "W", "Q_n", "P_1n", "Q_lqr"):
            _check_psd(name, getattr(self, name))
        for name in ("R_n", "R_lqr"):
            matrix = getattr(self, name)
            _check_psd(name, matrix)
            if np.linalg.eigvalsh(matrix).min() <= 0:
                raise ConfigError(f"{name} must be positive definite")
        if not 0.0 < self.rho < 1.0:
            raise ConfigError("Armijo rho must lie in (0, 1)")
        if not 0.0 < self.beta < 1.0:
            raise ConfigError("Armijo beta must lie in (0, 1)")
        if self.i_max < 1:
            raise ConfigError("iteration cap must be at least 1")
        self.r_pairs = {frozenset(k): float(v) for k, v in self.r_pairs.items()}
        self.W_pairs = {frozenset(k): np.asarray(v, dtype=float) for k, v in self.W_pairs.items()}
        if any(v <= 0 for v in self.r_pairs.values()):
            raise ConfigError("per-pair r overrides must be positive")

    def r_of(self, j: int, i: int) -> float:
        return self.r_pairs.get(frozenset((j, i)), self.r)

    def W_of(self, j: int, i: int) -> np.ndarray:
        return self.W_pairs.get(frozenset((j, i)), self.W)


def ergodic_metric(c_global: np.ndarray, p_k: np.ndarray, spectral: SpectralSet) -> float:
    """Shared metric ``sum_k Lambda_k (C_k - p_k)^2``."""
    c_global = np.asarray(c_global, dtype=float)
    p_k = np.asarray(p_k, dtype=float)
    if c_global.shape != p_k.shape or len(p_k) != spectral.size:
        raise ValueError("coefficient arrays come from mismatched spectral sets")
    diff = c_global - p_k
    return float(np.sum(spectral.lambda_k * diff * diff))


def _check_shared_grid(trajectories):
    t0 = trajectories[0].t
    for tr in trajectories[1:]:
        if tr.n_samples != len(t0) or not np.array_equal(tr.t, t0):
            raise ValueError("trajectories must share the time grid and horizon")


def total_cost(trajectories, weights: CostWeights, spectral: SpectralSet, p_k) -> float:
    """Cost of a fleet of trajectories (planning or feasible pairs)."""
    trajs = list(trajectories)
    _check_shared_grid(trajs)
    n_agents = len(trajs)
    w = trapezoid_weights(trajs[0].n_samples, trajs[0].dt)

    coeffs = global_coefficients([trajectory_coefficients(tr, spectral) for tr in trajs])
    cost = weights.q * ergodic_metric(coeffs, p_k, spectral)

    for tr in trajs:
        cost += 0.5 * float(w @ np.einsum("sm,mn,sn->s", tr.u, weights.R, tr.u))

    for j in range(n_agents):
        for i in range(j + 1, n_agents):
            delta = trajs[j].x - trajs[i].x
            quad = 0.5 * np.einsum("sn,nm,sm->s", delta, weights.W_of(j, i), delta)
            cost += float(w @ (1.0 / (weights.r_of(j, i) + quad)))
    return cost


def cost_gradients(agent: int, trajectories, weights: CostWeights, spectral: SpectralSet, p_k):
    """Gradient signals ``(a, b)`` of the cost seen by one agent.

    ``a`` collects the ergodic pull toward under-covered regions plus the
    repulsion from the estimated positions of the other agents; ``b`` is the
    control-energy gradient ``R u``.  Estimates stand in for the true
    trajectories of the others exactly as held in ``trajectories``.
    """
    trajs = list(trajectories)
    _check_shared_grid(trajs)
    own = trajs[agent]
    n_agents = len(trajs)
    domain = spectral.domain

    coeffs = global_coefficients([trajectory_coefficients(tr, spectral) for tr in trajs])
    chi = domain.project_states(own.x)
    grad_f = basis_gradients(spectral, chi)
    scale = 2.0 * weights.q * spectral.lambda_k * (coeffs - np.asarray(p_k)) / (n_agents * own.horizon)
    a = np.zeros_like(own.x)
    a[:, list(domain.exploratory)] = np.einsum("k,skd->sd", scale, grad_f)

    for i in range(n_agents):
        if i == agent:
            continue  # its numerator is identically zero
        delta = own.x - trajs[i].x
        w_delta = delta @ weights.W_of(agent, i)
        denom = weights.r_of(agent, i) + 0.5 * np.einsum("sn,sn->s", delta, w_delta)
        a -= w_delta / (denom * denom)[:, None]

    b = own.u @ weights.R
    return a, b


def directional_derivative(a: np.ndarray, b: np.ndarray, z: np.ndarray, v: np.ndarray, dt: float) -> float:
    """Trapezoidal evaluation of ``integral a.z dtau + integral b.v dtau``."""
    w = trapezoid_weights(len(a), dt)
    return float(w @ np.sum(a * z, axis=1) + w @ np.sum(b * v, axis=1))

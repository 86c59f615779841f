"""Deterministic quadrature helpers used by the spatial and time integrals."""

from __future__ import annotations

import numpy as np


def midpoint_grid(lengths, points_per_dim: int):
    """Tensor midpoint grid over the rectangle ``[0, L_1] x ... x [0, L_d]``.

    Returns ``(points, cell_volume)`` where ``points`` has shape
    ``(points_per_dim**d, d)`` and the quadrature rule is
    ``sum(f(points)) * cell_volume``.
    """
    lengths = np.asarray(lengths, dtype=float)
    axes = [(np.arange(points_per_dim) + 0.5) * (length / points_per_dim) for length in lengths]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    cell_volume = float(np.prod(lengths / points_per_dim))
    return points, cell_volume


def trapezoid_weights(n_samples: int, dt: float) -> np.ndarray:
    """Composite trapezoid weights for a uniform grid with ``n_samples`` points."""
    if n_samples < 2:
        raise ValueError("trapezoid rule needs at least two samples")
    w = np.full(n_samples, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def trapezoid(values: np.ndarray, dt: float) -> float:
    """Integrate samples of a scalar signal on a uniform grid."""
    values = np.asarray(values, dtype=float)
    return float(dt * (values.sum() - 0.5 * (values[0] + values[-1])))


def cumulative_trapezoid(values: np.ndarray, dt: float) -> np.ndarray:
    """Running integral on the grid; entry ``i`` is the integral up to ``t_i``."""
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    np.cumsum(0.5 * dt * (values[1:] + values[:-1]), axis=0, out=out[1:])
    return out

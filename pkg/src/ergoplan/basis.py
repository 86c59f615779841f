"""Cosine Fourier basis, spectral weights and occupancy coefficients.

The basis over the exploration rectangle is
``F_k(chi) = (1/h_k) prod_i cos(k_i pi chi_i / L_i)`` with ``h_k`` chosen so
every ``F_k`` has unit L2 norm on the rectangle.  Non-exploratory state
variables never enter: their harmonic limit is zero, which makes their
factor ``cos(0) = 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .quadrature import trapezoid_weights


@dataclass(frozen=True)
class SpectralSet:
    """Multi-index set with normalization factors and spectral weights.

    ``indices`` has one row per multi-index ``k`` (shape ``(nK, lam)``),
    ``h`` the unit-norm factors and ``lambda_k`` the decay weights
    ``(1 + |k|^2)^(-(lam+1)/2)`` shared by the metric and its gradient.
    """

    domain: object
    limits: tuple
    indices: np.ndarray
    h: np.ndarray
    lambda_k: np.ndarray

    @property
    def size(self) -> int:
        return len(self.indices)


def normalization(k, domain) -> float:
    """Factor ``h_k`` giving ``F_k`` unit norm: ``integral F_k^2 = 1``."""
    k = np.asarray(k, dtype=int)
    lengths = np.asarray(domain.lengths, dtype=float)
    factors = np.where(k == 0, lengths, lengths / 2.0)
    return float(np.sqrt(np.prod(factors)))


def lambda_weight(k, n_exploratory: int) -> float:
    """Decay weight ``(1 + |k|^2)^(-(lam+1)/2)`` with Euclidean ``|k|``."""
    k = np.asarray(k, dtype=float)
    return float((1.0 + np.sum(k * k)) ** (-0.5 * (n_exploratory + 1)))


def build_spectral_set(domain, limits) -> SpectralSet:
    """Enumerate all multi-indices ``0 <= k_i <= K_i`` for the domain.

    ``limits`` may list one harmonic cap per exploratory dimension, or one
    per state dimension; in the latter case caps on non-exploratory entries
    must be zero and are dropped.
    """
    limits = tuple(int(v) for v in limits)
    if any(v < 0 for v in limits):
        raise ConfigError("harmonic limits must be non-negative")
    lam = domain.n_exploratory
    if len(limits) == domain.state_dim and domain.state_dim != lam:
        dropped = [limits[i] for i in range(domain.state_dim) if i not in domain.exploratory]
        if any(dropped):
            raise ConfigError("non-exploratory state dimensions must have harmonic limit 0")
        limits = tuple(limits[i] for i in domain.exploratory)
    if len(limits) != lam:
        raise ConfigError(f"expected {lam} harmonic limits, got {len(limits)}")
    indices = np.array(
        list(itertools.product(*(range(v + 1) for v in limits))), dtype=int
    ).reshape(-1, lam)
    h = np.array([normalization(k, domain) for k in indices])
    lam_k = np.array([lambda_weight(k, lam) for k in indices])
    indices.flags.writeable = False
    h.flags.writeable = False
    lam_k.flags.writeable = False
    return SpectralSet(domain=domain, limits=limits, indices=indices, h=h, lambda_k=lam_k)


def basis_eval(k, chi, domain) -> float:
    """Evaluate ``F_k`` at one exploration-space point."""
    k = np.asarray(k, dtype=float)
    chi = np.asarray(chi, dtype=float)
    lengths = np.asarray(domain.lengths, dtype=float)
    return float(np.prod(np.cos(k * np.pi * chi / lengths)) / normalization(k, domain))


def basis_grad(k, chi, domain) -> np.ndarray:
    """Gradient of ``F_k`` with respect to the exploration coordinates."""
    k = np.asarray(k, dtype=float)
    chi = np.asarray(chi, dtype=float)
    lengths = np.asarray(domain.lengths, dtype=float)
    args = k * np.pi * chi / lengths
    cos_terms = np.cos(args)
    h = normalization(k, domain)
    grad = np.empty(len(chi))
    for d in range(len(chi)):
        others = np.prod(np.delete(cos_terms, d))
        grad[d] = -(k[d] * np.pi / lengths[d]) * np.sin(args[d]) * others / h
    return grad


def basis_matrix(spectral: SpectralSet, points: np.ndarray) -> np.ndarray:
    """All basis values at once: ``(S, nK)`` for ``S`` exploration points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    lengths = np.asarray(spectral.domain.lengths, dtype=float)
    out = np.ones((len(points), spectral.size))
    for d in range(points.shape[1]):
        out *= np.cos(np.outer(points[:, d], spectral.indices[:, d]) * (np.pi / lengths[d]))
    return out / spectral.h


def basis_gradients(spectral: SpectralSet, points: np.ndarray) -> np.ndarray:
    """All basis gradients at once: ``(S, nK, lam)``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    lengths = np.asarray(spectral.domain.lengths, dtype=float)
    lam = points.shape[1]
    args = [
        np.outer(points[:, d], spectral.indices[:, d]) * (np.pi / lengths[d]) for d in range(lam)
    ]
    cos_terms = [np.cos(a) for a in args]
    out = np.empty((len(points), spectral.size, lam))
    for d in range(lam):
        factor = -(spectral.indices[:, d] * np.pi / lengths[d]) * np.sin(args[d])
        for other in range(lam):
            if other != d:
                factor = factor * cos_terms[other]
        out[:, :, d] = factor / spectral.h
    return out


def trajectory_coefficients(traj, spectral: SpectralSet) -> np.ndarray:
    """Occupancy coefficients ``c_k = (1/T) integral F_k(M x(tau)) dtau``.

    Trapezoid rule on the trajectory grid; exact for constant integrands and
    consistent with every other time integral in the pipeline.
    """
    if traj.n_samples < 2:
        raise ValueError("trajectory must carry at least two samples")
    chi = spectral.domain.project_states(traj.x)
    F = basis_matrix(spectral, chi)
    w = trapezoid_weights(traj.n_samples, traj.dt)
    return (w @ F) / traj.horizon


def global_coefficients(per_agent) -> np.ndarray:
    """Fleet coefficients ``C_k``: arithmetic mean of per-agent ``c_k`` arrays."""
    arrays = [np.asarray(c, dtype=float) for c in per_agent]
    if not arrays:
        raise ValueError("need at least one coefficient array")
    size = arrays[0].shape
    if any(a.shape != size for a in arrays):
        raise ValueError("coefficient arrays come from mismatched spectral sets")
    return np.mean(arrays, axis=0)

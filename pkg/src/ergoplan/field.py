"""Exploration rectangle and its Gaussian-mixture information density.

The density lives on the rectangle spanned by the exploratory state
variables.  Because the Gaussian modes lose mass when truncated to the
rectangle, the mixture is renormalized at construction with the same
midpoint quadrature later used for the spatial Fourier coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .quadrature import midpoint_grid

#: default midpoint-grid resolution per exploratory dimension
DEFAULT_QUAD_POINTS = 200

#: required grid points per highest cosine harmonic
MIN_POINTS_PER_HARMONIC = 10


@dataclass(frozen=True)
class Domain:
    """Rectangular exploration domain embedded in the agent state space.

    ``lengths`` are the rectangle edge lengths, one per exploratory
    dimension; ``exploratory`` lists the state indices that map onto those
    dimensions (the selector applied to states before any basis or density
    evaluation).
    """

    lengths: tuple = (1.0, 1.0)
    state_dim: int = 3
    exploratory: tuple = (0, 1)

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(float(v) for v in self.lengths))
        object.__setattr__(self, "exploratory", tuple(int(i) for i in self.exploratory))
        if any(length <= 0 for length in self.lengths):
            raise ConfigError("domain edge lengths must be positive")
        lam = len(self.lengths)
        if not 1 <= lam <= self.state_dim:
            raise ConfigError("need 1 <= exploratory dimensions <= state dimension")
        if len(self.exploratory) != lam:
            raise ConfigError("selector must have one state index per exploratory dimension")
        if len(set(self.exploratory)) != lam:
            raise ConfigError("selector indices must be distinct")
        if any(not 0 <= i < self.state_dim for i in self.exploratory):
            raise ConfigError("selector indices must be valid state indices")

    @property
    def n_exploratory(self) -> int:
        return len(self.lengths)

    def project_states(self, states: np.ndarray) -> np.ndarray:
        """Map full states (..., n) to exploration coordinates (..., lam)."""
        return np.asarray(states)[..., list(self.exploratory)]


@dataclass(frozen=True)
class GaussianMode:
    weight: float
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if not 0.0 <= self.weight <= 1.0:
            raise ConfigError("mode weight must lie in [0, 1]")
        if cov.shape != (len(mean), len(mean)):
            raise ConfigError("covariance shape must match the mean dimension")
        if not np.allclose(cov, cov.T):
            raise ConfigError("covariance must be symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ConfigError("covariance must be positive definite") from exc


class GaussianMixture:
    """Weighted Gaussian modes renormalized over the exploration rectangle.

    Modes are specified in exploration coordinates.  The normalization
    constant is fixed once at construction by midpoint quadrature, so the
    returned density integrates to one over the rectangle regardless of how
    much Gaussian mass falls outside it.
    """

    def __init__(self, modes, domain: Domain, quad_points: int = DEFAULT_QUAD_POINTS):
        if not modes:
            raise ConfigError("mixture needs at least one mode")
        lam = domain.n_exploratory
        for mode in modes:
            if len(mode.mean) != lam:
                raise ConfigError("mode mean dimension must match the domain")
        self.modes = tuple(modes)
        self.domain = domain
        self.quad_points = int(quad_points)
        # cache per-mode inverse covariances and Gaussian normalizers
        self._inv_covs = [np.linalg.inv(m.cov) for m in self.modes]
        self._norms = [
            (2.0 * np.pi) ** (-0.5 * lam) * np.linalg.det(m.cov) ** -0.5 for m in self.modes
        ]
        points, cell = midpoint_grid(domain.lengths, self.quad_points)
        self._mass = float(np.sum(self.density_unnormalized(points)) * cell)

    @property
    def normalization(self) -> float:
        """Mass of the raw mixture on the rectangle (the rescaling constant)."""
        return self._mass

    def density_unnormalized(self, points: np.ndarray) -> np.ndarray:
        """Weighted sum of Gaussian mode densities before rectangle rescaling."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        total = np.zeros(len(points))
        for mode, inv_cov, norm in zip(self.modes, self._inv_covs, self._norms):
            delta = points - mode.mean
            quad = np.einsum("si,ij,sj->s", delta, inv_cov, delta)
            total += mode.weight * norm * np.exp(-0.5 * quad)
        return total

    def density(self, points: np.ndarray) -> np.ndarray:
        return self.density_unnormalized(points) / self._mass


def density_at(mixture: GaussianMixture, point) -> float:
    """Normalized density value at one exploration-space point."""
    return float(mixture.density(np.asarray(point, dtype=float))[0])


def spatial_coefficients(
    mixture: GaussianMixture,
    spectral,
    points_per_dim: int | None = None,
) -> np.ndarray:
    """Fourier coefficients ``p_k`` of the normalized density.

    Computed by the deterministic tensor midpoint rule
    ``p_k = sum p(chi_g) F_k(chi_g) * cell``; the resolution must be at
    least :data:`MIN_POINTS_PER_HARMONIC` times the highest harmonic so the
    fastest cosine is resolved.
    """
    from .basis import basis_matrix

    if points_per_dim is None:
        points_per_dim = mixture.quad_points
    k_max = int(np.max(spectral.indices)) if spectral.indices.size else 0
    if points_per_dim < MIN_POINTS_PER_HARMONIC * max(k_max, 1):
        raise ConfigError(
            f"quadrature needs >= {MIN_POINTS_PER_HARMONIC} points per harmonic: "
            f"{points_per_dim} points for harmonic {k_max}"
        )
    points, cell = midpoint_grid(mixture.domain.lengths, points_per_dim)
    values = mixture.density(points)
    F = basis_matrix(spectral, points)
    return F.T @ (values * cell)

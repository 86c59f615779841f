"""Scenario definitions: builtin cases, tuning defaults and YAML files.

The two builtin information densities are ``volcano`` (one dominant central
mode ringed by four minor ones) and ``archipelago`` (four equal corners).
Default tuning values follow the reference parameter set used throughout
the test cases; every field can be overridden in a scenario file.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .errors import ConfigError
from .field import Domain, GaussianMixture, GaussianMode
from .objective import CostWeights

#: identifier of the deterministic generator behind seeded draws
GENERATOR_NAME = "numpy-default-rng-pcg64"

BUILTIN_NAMES = ("volcano", "archipelago")


def as_matrix(value, dim: int) -> np.ndarray:
    """Accept a scalar (scaled identity), diagonal list, or full matrix."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(dim)
    if arr.ndim == 1:
        if len(arr) != dim:
            raise ConfigError(f"diagonal of length {len(arr)} does not fit dimension {dim}")
        return np.diag(arr)
    if arr.shape != (dim, dim):
        raise ConfigError(f"matrix shape {arr.shape} does not fit dimension {dim}")
    return arr


def default_weights(r: float = 1.0) -> CostWeights:
    """Reference tuning: cost, quadratic-model and projector parameters."""
    return CostWeights(
        q=100.0,
        R=as_matrix(0.03, 2),
        r=r,
        W=as_matrix([1.0, 1.0, 0.0], 3),
        Q_n=as_matrix(450.0, 3),
        R_n=as_matrix(14.5, 2),
        P_1n=as_matrix(50.0, 3),
        Q_lqr=as_matrix(1.0, 3),
        R_lqr=as_matrix(1.0, 2),
        rho=1e-4,
        beta=0.99,
        i_max=70,
    )


@dataclass
class ScenarioConfig:
    """Complete run configuration: domain, density, tuning and execution."""

    name: str
    domain: Domain
    modes: tuple
    weights: CostWeights
    harmonics: tuple = (10, 10, 0)
    horizon: float = 3.5
    steps: int = 350
    circle_radius: float = 0.05
    quad_points: int = 200
    epsilon_opt: float = 99.5
    n_agents: int = 5
    seed: int = 0
    graph: dict | None = field(default_factory=lambda: {"random": {"p": 0.4, "seed": 0}})

    def __post_init__(self):
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")
        if self.steps < 2:
            raise ConfigError("need at least two grid steps")
        if self.n_agents < 1:
            raise ConfigError("need at least one agent")
        if not 0.0 < self.epsilon_opt <= 100.0:
            raise ConfigError("epsilon_opt must lie in (0, 100]")

    def build_mixture(self) -> GaussianMixture:
        return GaussianMixture(self.modes, self.domain, quad_points=self.quad_points)


def _volcano_modes():
    minor = [(0.75, 0.5), (0.25, 0.5), (0.5, 0.75), (0.5, 0.25)]
    modes = [GaussianMode(0.6, np.array([0.5, 0.5]), 0.014 * np.eye(2))]
    # the four minor modes are equally weighted; 0.1 each makes the weights sum to 1
    modes += [GaussianMode(0.1, np.array(mean), 0.004 * np.eye(2)) for mean in minor]
    return tuple(modes)


def _archipelago_modes():
    means = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]
    return tuple(GaussianMode(0.25, np.array(mean), 0.006 * np.eye(2)) for mean in means)


def builtin_scenario(name: str) -> ScenarioConfig:
    """Full configuration for one of the builtin exploration cases."""
    if name not in BUILTIN_NAMES:
        raise ConfigError(f"unknown scenario {name!r}; builtins are {BUILTIN_NAMES}")
    modes = _volcano_modes() if name == "volcano" else _archipelago_modes()
    return ScenarioConfig(
        name=name,
        domain=Domain(lengths=(1.0, 1.0), state_dim=3, exploratory=(0, 1)),
        modes=modes,
        weights=default_weights(),
    )


def random_initials(seed: int, n_agents: int) -> np.ndarray:
    """Uniform initial states: positions in ``[0.05, 0.95]^2``, free heading."""
    if n_agents < 1:
        raise ConfigError("need at least one agent")
    rng = np.random.default_rng(seed)
    states = np.empty((n_agents, 3))
    for j in range(n_agents):
        states[j, 0] = rng.uniform(0.05, 0.95)
        states[j, 1] = rng.uniform(0.05, 0.95)
        states[j, 2] = rng.uniform(0.0, 2.0 * np.pi)
    return states


def to_dict(config: ScenarioConfig) -> dict:
    """Serializable key-value tree with sections domain/mixture/weights/graph/run."""
    w = config.weights
    return {
        "schema": 1,
        "name": config.name,
        "domain": {
            "lengths": list(config.domain.lengths),
            "state_dim": config.domain.state_dim,
            "exploratory": list(config.domain.exploratory),
        },
        "mixture": {
            "modes": [
                {
                    "weight": mode.weight,
                    "mean": [float(v) for v in mode.mean],
                    "cov": [[float(v) for v in row] for row in mode.cov],
                }
                for mode in config.modes
            ]
        },
        "weights": {
            "q": w.q,
            "R": [[float(v) for v in row] for row in w.R],
            "r": w.r,
            "W": [[float(v) for v in row] for row in w.W],
            "Q_n": [[float(v) for v in row] for row in w.Q_n],
            "R_n": [[float(v) for v in row] for row in w.R_n],
            "P_1n": [[float(v) for v in row] for row in w.P_1n],
            "Q_LQR": [[float(v) for v in row] for row in w.Q_lqr],
            "R_LQR": [[float(v) for v in row] for row in w.R_lqr],
            "rho": w.rho,
            "beta": w.beta,
            "i_max": w.i_max,
        },
        "graph": config.graph,
        "run": {
            "horizon": config.horizon,
            "steps": config.steps,
            "harmonics": list(config.harmonics),
            "circle_radius": config.circle_radius,
            "quad_points": config.quad_points,
            "epsilon_opt": config.epsilon_opt,
            "agents": config.n_agents,
            "seed": config.seed,
        },
    }


def from_dict(data: dict) -> ScenarioConfig:
    try:
        domain_data = data["domain"]
        domain = Domain(
            lengths=tuple(domain_data["lengths"]),
            state_dim=int(domain_data["state_dim"]),
            exploratory=tuple(domain_data["exploratory"]),
        )
        lam = domain.n_exploratory
        modes = tuple(
            GaussianMode(
                weight=float(mode["weight"]),
                mean=np.asarray(mode["mean"], dtype=float),
                cov=as_matrix(mode["cov"], lam),
            )
            for mode in data["mixture"]["modes"]
        )
        wd = data["weights"]
        n, m = domain.state_dim, 2
        weights = CostWeights(
            q=float(wd["q"]),
            R=as_matrix(wd["R"], m),
            r=float(wd.get("r", 1.0)),
            W=as_matrix(wd["W"], n),
            Q_n=as_matrix(wd["Q_n"], n),
            R_n=as_matrix(wd["R_n"], m),
            P_1n=as_matrix(wd["P_1n"], n),
            Q_lqr=as_matrix(wd["Q_LQR"], n),
            R_lqr=as_matrix(wd["R_LQR"], m),
            rho=float(wd.get("rho", 1e-4)),
            beta=float(wd.get("beta", 0.99)),
            i_max=int(wd.get("i_max", 70)),
            # per-pair penalty overrides as [agent, agent, value] triples
            r_pairs={(int(a), int(b)): float(v) for a, b, v in (wd.get("r_pairs") or [])},
        )
        run = data.get("run", {})
        return ScenarioConfig(
            name=str(data.get("name", "custom")),
            domain=domain,
            modes=modes,
            weights=weights,
            harmonics=tuple(run.get("harmonics", (10, 10, 0))),
            horizon=float(run.get("horizon", 3.5)),
            steps=int(run.get("steps", 350)),
            circle_radius=float(run.get("circle_radius", 0.05)),
            quad_points=int(run.get("quad_points", 200)),
            epsilon_opt=float(run.get("epsilon_opt", 99.5)),
            n_agents=int(run.get("agents", 5)),
            seed=int(run.get("seed", 0)),
            graph=data.get("graph"),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario file: {exc}") from exc


def save_scenario(config: ScenarioConfig, path):
    with open(path, "w") as handle:
        yaml.safe_dump(to_dict(config), handle, sort_keys=False)


def load_scenario(path) -> ScenarioConfig:
    with open(path) as handle:
        data = yaml.safe_load(handle)
    if not isinstance(data, dict):
        raise ConfigError(f"scenario file {path} does not hold a key-value tree")
    return from_dict(data)


def resolve_scenario(name_or_path: str) -> ScenarioConfig:
    """Builtin scenario name, or path to a scenario YAML file."""
    if name_or_path in BUILTIN_NAMES:
        return builtin_scenario(name_or_path)
    return load_scenario(name_or_path)

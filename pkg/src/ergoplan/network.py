"""Round-synchronous communication: topology, estimate exchange, flooding.

The exchange implements the averaging protocol: neighbours (and the agent
itself) are copied exactly from the current round, everyone else is the
pointwise average of the previous round's estimates held in the closed
neighbourhood.  All updates read the round-start views only, so the result
does not depend on agent order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import networkx as nx
import numpy as np

from .dynamics import PLANNING, Trajectory
from .errors import ConfigError

_RANDOM_GRAPH_MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class CommGraph:
    """Validated undirected connected topology."""

    n: int
    edges: tuple
    neighbors: tuple  # neighbors[j] is a sorted tuple of adjacent agent ids
    diameter: int


def from_edges(n: int, edges) -> CommGraph:
    """Build and validate a topology from an explicit edge list."""
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for edge in edges:
        a, b = int(edge[0]), int(edge[1])
        if a == b:
            raise ConfigError(f"self-loop on agent {a} is not allowed")
        if not (0 <= a < n and 0 <= b < n):
            raise ConfigError(f"edge ({a}, {b}) references an unknown agent")
        graph.add_edge(a, b)
    if n > 1 and not nx.is_connected(graph):
        raise ConfigError("communication graph must be connected")
    diameter = nx.diameter(graph) if n > 1 else 0
    neighbor_map = tuple(tuple(sorted(graph.neighbors(j))) for j in range(n))
    edge_tuple = tuple(sorted((min(a, b), max(a, b)) for a, b in graph.edges()))
    return CommGraph(n=n, edges=edge_tuple, neighbors=neighbor_map, diameter=diameter)


def random_graph(n: int, p: float, seed: int) -> CommGraph:
    """Seeded Erdos-Renyi topology, retried until connected."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError("edge probability must lie in [0, 1]")
    for attempt in range(_RANDOM_GRAPH_MAX_ATTEMPTS):
        candidate = nx.gnp_random_graph(n, p, seed=int(seed) + attempt)
        if n == 1 or nx.is_connected(candidate):
            return from_edges(n, list(candidate.edges()))
    raise ConfigError(
        f"no connected graph with n={n}, p={p} after {_RANDOM_GRAPH_MAX_ATTEMPTS} attempts")


def build_graph(spec, n_agents: int) -> CommGraph:
    """Build a topology from a scenario graph specification.

    ``spec`` is either ``{"edges": [[a, b], ...]}`` or ``{"random": {"p":
    float, "seed": int}}`` (an optional ``n`` must match the agent count).
    ``None`` builds the single-vertex graph for one agent and rejects more.
    """
    if spec is None:
        if n_agents == 1:
            return from_edges(1, [])
        raise ConfigError("a graph specification is required for more than one agent")
    if "edges" in spec:
        return from_edges(n_agents, spec["edges"])
    if "random" in spec:
        params = spec["random"]
        n = int(params.get("n", n_agents))
        if n != n_agents:
            raise ConfigError(f"graph size {n} does not match agent count {n_agents}")
        return random_graph(n, float(params.get("p", 0.4)), int(params.get("seed", 0)))
    raise ConfigError("graph spec must contain 'edges' or 'random'")


def exchange(graph: CommGraph, views):
    """One synchronous estimate exchange; returns the updated views.

    Reads only the input views (previous-round estimates and current own
    trajectories), so it acts as a barrier between rounds.
    """
    views = list(views)
    if len(views) != graph.n:
        raise ValueError("one view per graph vertex is required")
    rounds = {view.round_index for view in views}
    if len(rounds) != 1:
        raise ValueError("views must all be at the same round")
    t = views[0].own.t

    updated = []
    for j, view in enumerate(views):
        closed = sorted(set(graph.neighbors[j]) | {j})
        estimates = []
        for target in range(graph.n):
            if target in closed:
                estimates.append(views[target].own)
            else:
                x_avg = np.mean([views[k].trajectories[target].x for k in closed], axis=0)
                u_avg = np.mean([views[k].trajectories[target].u for k in closed], axis=0)
                estimates.append(Trajectory(t, x_avg, u_avg, kind=PLANNING))
        updated.append(replace(view, trajectories=tuple(estimates)))
    return updated


def flood_termination(graph: CommGraph, views):
    """Union each agent's termination flags with its neighbours' sets once."""
    updated = []
    for j, view in enumerate(views):
        flags = set(view.done_flags)
        if view.local_done:
            flags.add(j)
        for k in graph.neighbors[j]:
            flags |= views[k].done_flags
        updated.append(replace(view, done_flags=frozenset(flags)))
    return updated


def stopped(view, n_agents: int) -> bool:
    """An agent stops once it holds termination flags from every agent."""
    return len(view.done_flags) == n_agents

"""Benchmark graphs with planted cliques and guarded noise edges.

Cliques are planted first. Every edge added afterwards, from external noise
nodes or between cliques, is kept only if the greedy coloring bound of the
graph does not rise above the bound of the cliques-only graph. Since the
clique number never exceeds a coloring bound, the largest planted clique
stays a maximum clique.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

from ._rng import make_rng
from .errors import GraphError, LabError, RatioUndefinedError
from .graph import Graph, density, greedy_chromatic_upper_bound

log = logging.getLogger(__name__)

EMBEDDING_BUDGET = 164


@dataclass(frozen=True)
class GraphRecipe:
    n_node: int
    ex_node: int = 0
    n_cli: int = 1
    add_edges: bool = False
    rand_cli: bool = False
    intra_edge_pct: float = 0.3
    inter_edge_pct: float = 0.3
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_node < 1:
            raise LabError(f"n_node must be >= 1, got {self.n_node}")
        if self.n_cli < 1:
            raise LabError(f"n_cli must be >= 1, got {self.n_cli}")
        if self.ex_node < 0:
            raise LabError(f"ex_node must be >= 0, got {self.ex_node}")
        for name in ("intra_edge_pct", "inter_edge_pct"):
            pct = getattr(self, name)
            if not 0.0 <= pct <= 1.0:
                raise LabError(f"{name} must lie in [0, 1], got {pct}")

    @property
    def final_dim(self) -> int:
        return self.n_node * self.n_cli + self.ex_node

    def to_record(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BenchGraph:
    graph: Graph
    clique_lists: tuple[frozenset[int], ...]
    planted_max_size: int
    recipe: GraphRecipe
    isolated_external: tuple[int, ...] = field(default=())
    # greedy bound before the final relabeling; the bound is label dependent
    guard_bound: int = 0

    def to_record(self) -> dict:
        return {
            "recipe": self.recipe.to_record(),
            "final_dim": self.graph.vertex_count,
            "planted_max_size": self.planted_max_size,
            "clique_lists": [sorted(c) for c in self.clique_lists],
            "isolated_external": list(self.isolated_external),
            "density": density(self.graph) if self.graph.vertex_count >= 2 else 0.0,
            "greedy_bound": greedy_chromatic_upper_bound(self.graph),
            "guard_bound": self.guard_bound,
        }


def _try_add(adj: list[set[int]], u: int, v: int, baseline: int) -> bool:
    adj[u].add(v)
    adj[v].add(u)
    if greedy_chromatic_upper_bound(adj) <= baseline:
        return True
    adj[u].discard(v)
    adj[v].discard(u)
    return False


def add_guarded_edge(g: Graph, u: int, v: int, baseline_bound: int) -> tuple[Graph, bool]:
    """Add ``(u, v)`` only if the greedy bound stays within ``baseline_bound``."""
    if u == v:
        raise GraphError(f"self-loop at vertex {u}")
    if g.has_edge(u, v):
        raise GraphError(f"edge ({u}, {v}) already present")
    adj = [set(a) for a in g.adjacency]
    if _try_add(adj, u, v, baseline_bound):
        return Graph.from_adjacency(adj), True
    return g, False


def _attempts(pct: float, available: int, minimum: int = 0) -> int:
    return min(available, max(minimum, math.ceil(pct * available)))


def graph_creation(recipe: GraphRecipe) -> BenchGraph:
    final_dim = recipe.final_dim
    if final_dim > EMBEDDING_BUDGET:
        log.warning(
            "recipe yields %d vertices, above the %d-variable embedding budget",
            final_dim, EMBEDDING_BUDGET,
        )
    rng = make_rng(recipe.rng_seed)

    if recipe.rand_cli and recipe.n_node >= 2:
        sizes = [int(s) for s in rng.integers(2, recipe.n_node + 1, size=recipe.n_cli)]
    else:
        sizes = [recipe.n_node] * recipe.n_cli

    adj: list[set[int]] = [set() for _ in range(final_dim)]
    cliques: list[list[int]] = []
    start = 0
    for size in sizes:
        members = list(range(start, start + size))
        for u, v in combinations(members, 2):
            adj[u].add(v)
            adj[v].add(u)
        cliques.append(members)
        start += size
    external = list(range(start, final_dim))
    baseline = greedy_chromatic_upper_bound(adj)

    isolated = []
    for v in external:
        targets = [u for u in range(final_dim) if u != v and u not in adj[v]]
        count = _attempts(recipe.intra_edge_pct, len(targets), minimum=1)
        picks = rng.choice(len(targets), size=count, replace=False) if count else []
        for k in picks:
            _try_add(adj, v, targets[k], baseline)
        if not adj[v]:
            isolated.append(v)

    if recipe.add_edges:
        for a, b in combinations(range(len(cliques)), 2):
            pairs = [(u, w) for u in cliques[a] for w in cliques[b] if w not in adj[u]]
            count = _attempts(recipe.inter_edge_pct, len(pairs))
            picks = rng.choice(len(pairs), size=count, replace=False) if count else []
            for k in picks:
                _try_add(adj, *pairs[k], baseline)

    if isolated:
        log.info("external nodes left isolated by the guard: %s", isolated)

    guard_bound = greedy_chromatic_upper_bound(adj)
    perm = [int(p) for p in rng.permutation(final_dim)]
    edges = [(perm[u], perm[v]) for u in range(final_dim) for v in adj[u] if u < v]
    graph = Graph(final_dim, edges)
    return BenchGraph(
        graph=graph,
        clique_lists=tuple(frozenset(perm[u] for u in c) for c in cliques),
        planted_max_size=max(sizes),
        recipe=recipe,
        isolated_external=tuple(sorted(perm[v] for v in isolated)),
        guard_bound=guard_bound,
    )


def ratio(c_m: int, d_g: int) -> float:
    """Clique size over the number of vertices outside it."""
    if c_m < 1 or d_g <= c_m:
        raise RatioUndefinedError(f"ratio needs d_g > c_m >= 1, got c_m={c_m}, d_g={d_g}")
    return c_m / (d_g - c_m)


def clique_size_for_ratio(r: float, d_g: int) -> int:
    """Clique size whose ratio on a ``d_g``-vertex graph is closest to ``r``."""
    best = min(range(1, d_g), key=lambda c: (abs(ratio(c, d_g) - r), c))
    return best

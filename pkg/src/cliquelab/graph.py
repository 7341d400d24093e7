"""Immutable simple undirected graphs and the metrics computed on them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DensityUndefinedError, GraphError

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph on the dense vertex set ``0..N-1``.

    Construction is strict: self-loops, duplicate edges (in either
    orientation) and labels outside ``0..N-1`` raise :class:`GraphError`.
    Instances never change after construction.
    """

    __slots__ = ("_n", "_edges", "_adj")

    def __init__(self, vertex_count: int, edges: Iterable[Sequence[int]] = ()):
        if vertex_count < 0:
            raise GraphError(f"vertex_count must be >= 0, got {vertex_count}")
        adj: list[set[int]] = [set() for _ in range(vertex_count)]
        seen: set[Edge] = set()
        for pair in edges:
            u, v = int(pair[0]), int(pair[1])
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError(f"edge ({u}, {v}) outside 0..{vertex_count - 1}")
            e = _norm(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
            adj[u].add(v)
            adj[v].add(u)
        self._n = vertex_count
        self._edges = frozenset(seen)
        self._adj = tuple(frozenset(a) for a in adj)

    @classmethod
    def from_adjacency(cls, adj: Sequence[Iterable[int]]) -> "Graph":
        """Build from symmetric neighbor sets (used by in-place algorithms)."""
        edges = [(u, v) for u, nbrs in enumerate(adj) for v in nbrs if u < v]
        return cls(len(adj), edges)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        return cls(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    @classmethod
    def petersen(cls) -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls(10, outer + spokes + inner)

    @property
    def vertex_count(self) -> int:
        return self._n

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        return self._adj

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def vertices(self) -> range:
        return range(self._n)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def sorted_edges(self) -> list[Edge]:
        return sorted(self._edges)

    def with_edge(self, u: int, v: int) -> "Graph":
        return Graph(self._n, [*self._edges, (u, v)])

    def induced_subgraph(self, keep: Iterable[int]) -> tuple["Graph", list[int]]:
        """Subgraph induced by ``keep``, relabeled densely.

        Returns the subgraph and the list mapping new labels to old ones.
        """
        order = sorted(set(keep))
        index = {old: new for new, old in enumerate(order)}
        edges = [
            (index[u], index[v]) for u, v in self._edges if u in index and v in index
        ]
        return Graph(len(order), edges), order

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(vertex_count={self._n}, edge_count={len(self._edges)})"


def complement(g: Graph) -> Graph:
    n = g.vertex_count
    return Graph(n, [(u, v) for u, v in combinations(range(n), 2) if not g.has_edge(u, v)])


def density(g: Graph) -> float:
    n = g.vertex_count
    if n < 2:
        raise DensityUndefinedError(f"density needs at least 2 vertices, got {n}")
    return 2.0 * g.edge_count / (n * (n - 1))


def greedy_coloring(adj: Sequence[Iterable[int]]) -> list[int]:
    """Largest-first greedy coloring over neighbor sets.

    Vertices are visited by degree descending, ties by ascending label,
    and each gets the smallest color unused by its colored neighbors.
    """
    n = len(adj)
    order = sorted(range(n), key=lambda v: (-len(adj[v]), v))
    colors = [-1] * n
    for v in order:
        taken = {colors[u] for u in adj[v] if colors[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return colors


def greedy_chromatic_upper_bound(g: Graph | Sequence[Iterable[int]]) -> int:
    adj = g.adjacency if isinstance(g, Graph) else g
    colors = greedy_coloring(adj)
    return max(colors) + 1 if colors else 0


@dataclass(frozen=True)
class ConnectivityIndices:
    degree_mean: float
    degree_variance: float
    eccentricity_min: int
    eccentricity_max: int
    center_size: int
    periphery_size: int
    centralization: float
    closeness_mean: float
    closeness_variance: float
    betweenness_mean: float
    betweenness_variance: float


def _bfs_distances(adj: Sequence[Iterable[int]], source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def components(g: Graph) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for s in g.vertices():
        if s not in seen:
            comp = sorted(_bfs_distances(g.adjacency, s))
            seen.update(comp)
            out.append(comp)
    return out


def eccentricities(g: Graph) -> list[int]:
    """Eccentricity of each vertex inside its own component (isolated -> 0)."""
    return [max(_bfs_distances(g.adjacency, v).values()) for v in g.vertices()]


def closeness(g: Graph) -> list[float]:
    """Component-local closeness ``(n_c - 1) / sum of distances``; 0 when isolated."""
    out = []
    for v in g.vertices():
        dist = _bfs_distances(g.adjacency, v)
        total = sum(dist.values())
        out.append((len(dist) - 1) / total if total else 0.0)
    return out


def betweenness(g: Graph) -> list[float]:
    """Brandes betweenness, normalized by ``(n_c - 1)(n_c - 2)/2`` of the component."""
    adj = g.adjacency
    n = g.vertex_count
    raw = [0.0] * n
    for s in range(n):
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                raw[w] += delta[w]
    comp_size = [0] * n
    for comp in components(g):
        for v in comp:
            comp_size[v] = len(comp)
    out = []
    for v in range(n):
        nc = comp_size[v]
        # each unordered pair was counted from both endpoints
        pairs = (nc - 1) * (nc - 2) / 2
        out.append(raw[v] / 2 / pairs if pairs > 0 else 0.0)
    return out


def _mean_var(values: Sequence[float]) -> tuple[float, float]:
    m = sum(values) / len(values)
    return m, sum((x - m) ** 2 for x in values) / len(values)


def connectivity_indices(g: Graph) -> ConnectivityIndices:
    n = g.vertex_count
    if n == 0:
        raise GraphError("connectivity indices are undefined on the empty graph")
    degrees = [g.degree(v) for v in g.vertices()]
    ecc = eccentricities(g)
    lo, hi = min(ecc), max(ecc)
    dmax = max(degrees)
    central = sum(dmax - d for d in degrees) / ((n - 1) * (n - 2)) if n > 2 else 0.0
    deg_mean, deg_var = _mean_var(degrees)
    clo_mean, clo_var = _mean_var(closeness(g))
    bet_mean, bet_var = _mean_var(betweenness(g))
    return ConnectivityIndices(
        degree_mean=deg_mean,
        degree_variance=deg_var,
        eccentricity_min=lo,
        eccentricity_max=hi,
        center_size=ecc.count(lo),
        periphery_size=ecc.count(hi),
        centralization=central,
        closeness_mean=clo_mean,
        closeness_variance=clo_var,
        betweenness_mean=bet_mean,
        betweenness_variance=bet_var,
    )

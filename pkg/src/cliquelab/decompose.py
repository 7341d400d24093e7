"""Independent-set preserving graph reduction.

The input is the complement of the graph whose maximum clique is sought.
A vertex ``v`` is removable when two of its neighbors ``v'`` and ``v''``
are not adjacent to each other: deleting ``v`` leaves them free to join an
independent set together. High-degree vertices are tried first because
they are the least likely members of a maximum independent set. After a
removal ``v'`` and ``v''`` become protected and are never removed.

A removal is only applied while the greedy coloring bound of the
complement of the remaining graph stays at or above ``min_cn``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from ._rng import make_rng
from .errors import LabError
from .graph import Graph, greedy_chromatic_upper_bound

log = logging.getLogger(__name__)

Triple = tuple[int, int, int]

REACHED_FINAL_DIM = "reached_final_dim"
NO_CANDIDATE = "no_candidate"
GUARD_BLOCKED = "guard_blocked"


@dataclass(frozen=True)
class DecomposeConfig:
    final_dim: int
    min_cn: int
    max_triple_depth: int = 5
    random_probe_budget: Optional[int] = None  # None -> 100 * N
    rng_seed: int = 0
    deterministic: bool = False  # break degree ties by label instead of at random

    def __post_init__(self):
        if self.final_dim < 1:
            raise LabError(f"final_dim must be >= 1, got {self.final_dim}")
        if self.min_cn < 1:
            raise LabError(f"min_cn must be >= 1, got {self.min_cn}")
        if self.max_triple_depth < 1:
            raise LabError(f"max_triple_depth must be >= 1, got {self.max_triple_depth}")


@dataclass
class DecomposeTrace:
    removed_vertices: list[int] = field(default_factory=list)
    protected_vertices: set[int] = field(default_factory=set)
    iterations: int = 0
    stop_reason: str = NO_CANDIDATE
    kept_vertices: list[int] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "removed_vertices": self.removed_vertices,
            "protected_vertices": sorted(self.protected_vertices),
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "kept_vertices": self.kept_vertices,
        }


def _as_adj(g: Graph | Sequence[set[int]]) -> Sequence[set[int]] | Sequence[frozenset[int]]:
    return g.adjacency if isinstance(g, Graph) else g


def _alive(adj) -> list[int]:
    # removed vertices carry None in the working adjacency
    return [v for v in range(len(adj)) if adj[v] is not None]


def _complement_bound_without(adj, v: int) -> int:
    """Greedy bound of the complement of the live graph minus ``v``."""
    alive = [u for u in _alive(adj) if u != v]
    index = {u: k for k, u in enumerate(alive)}
    live = set(alive)
    comp = [set() for _ in alive]
    for u in alive:
        others = live - adj[u]
        others.discard(u)
        comp[index[u]] = {index[w] for w in others}
    return greedy_chromatic_upper_bound(comp)


def guard_allows_removal(g: Graph | Sequence, v: int, min_cn: int) -> bool:
    """True when removing ``v`` keeps the complement's greedy bound >= ``min_cn``."""
    adj = _as_adj(g)
    if min_cn <= 0:
        return True
    return _complement_bound_without(adj, v) >= min_cn


def _split_pair(adj, v: int) -> Optional[tuple[int, int]]:
    """First (by label) pair of non-adjacent neighbors of ``v``."""
    nbrs = sorted(adj[v])
    for a, b in combinations(nbrs, 2):
        if b not in adj[a]:
            return a, b
    return None


def find_max_degree_removable(
    g: Graph | Sequence,
    protected: set[int],
    min_cn: int,
    depth: int = 5,
    rng: Optional[np.random.Generator] = None,
) -> Optional[Triple]:
    """Highest-degree removable vertex with its splitting neighbor pair.

    Vertices are scanned one degree class at a time, highest first, for at
    most ``depth`` classes. Inside a class the order is by label, or
    shuffled when ``rng`` is given.
    """
    adj = _as_adj(g)
    cands = [v for v in _alive(adj) if v not in protected]
    classes: dict[int, list[int]] = {}
    for v in cands:
        classes.setdefault(len(adj[v]), []).append(v)
    for deg in sorted(classes, reverse=True)[:depth]:
        members = classes[deg]
        if rng is not None:
            members = [members[k] for k in rng.permutation(len(members))]
        for v in members:
            pair = _split_pair(adj, v)
            if pair is not None and guard_allows_removal(adj, v, min_cn):
                return v, pair[0], pair[1]
    return None


def find_random_removable(
    g: Graph | Sequence,
    protected: set[int],
    min_cn: int,
    budget: int,
    rng: np.random.Generator,
) -> Optional[Triple]:
    """Probe up to ``budget`` random triples for a removable vertex."""
    if budget < 1:
        raise LabError(f"budget must be >= 1, got {budget}")
    adj = _as_adj(g)
    cands = [v for v in _alive(adj) if v not in protected and len(adj[v]) >= 2]
    if not cands:
        return None
    for _ in range(budget):
        v = cands[rng.integers(len(cands))]
        nbrs = sorted(adj[v])
        i, j = rng.choice(len(nbrs), size=2, replace=False)
        a, b = sorted((nbrs[i], nbrs[j]))
        if b not in adj[a] and guard_allows_removal(adj, v, min_cn):
            return v, a, b
    return None


def _any_structural_candidate(adj, protected: set[int]) -> bool:
    return any(
        _split_pair(adj, v) is not None for v in _alive(adj) if v not in protected
    )


def decompose_is(g: Graph, cfg: DecomposeConfig) -> tuple[Graph, DecomposeTrace]:
    """Shrink ``g`` towards ``cfg.final_dim`` vertices.

    Returns the induced subgraph on the surviving vertices (relabeled
    densely; ``trace.kept_vertices`` maps new labels to old ones) and the
    trace of removals.
    """
    n = g.vertex_count
    if cfg.final_dim > n:
        raise LabError(f"final_dim {cfg.final_dim} exceeds vertex count {n}")
    adj: list[Optional[set[int]]] = [set(a) for a in g.adjacency]
    rng = make_rng(cfg.rng_seed)
    tie_rng = None if cfg.deterministic else rng
    budget = cfg.random_probe_budget or 100 * max(n, 1)
    trace = DecomposeTrace()
    size = n
    while size > cfg.final_dim and trace.iterations < 2 * n:
        trace.iterations += 1
        found = find_max_degree_removable(
            adj, trace.protected_vertices, cfg.min_cn, cfg.max_triple_depth, tie_rng
        )
        if found is None:
            found = find_random_removable(adj, trace.protected_vertices, cfg.min_cn, budget, rng)
        if found is None:
            trace.stop_reason = (
                GUARD_BLOCKED
                if _any_structural_candidate(adj, trace.protected_vertices)
                else NO_CANDIDATE
            )
            break
        v, a, b = found
        if guard_allows_removal(adj, v, cfg.min_cn):
            for u in adj[v]:
                adj[u].discard(v)
            adj[v] = None
            size -= 1
            trace.removed_vertices.append(v)
            trace.protected_vertices.update((a, b))
    else:
        if size <= cfg.final_dim:
            trace.stop_reason = REACHED_FINAL_DIM
    trace.kept_vertices = _alive(adj)
    out, _ = g.induced_subgraph(trace.kept_vertices)
    log.debug("decompose: %d -> %d vertices (%s)", n, out.vertex_count, trace.stop_reason)
    return out, trace

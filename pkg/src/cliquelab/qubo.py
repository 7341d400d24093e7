"""QUBO and Ising models for maximum independent set / maximum clique.

The independent-set objective on a graph ``G`` is

    H(x) = -a * sum_i x_i + b * sum_{(i, j) in E(G)} x_i x_j

with ``b > a > 0`` so that dropping an endpoint of a violated edge always
lowers the energy. Maximum clique is solved as independent set on the
complement graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, DomainError, PenaltyConfigError
from .graph import Graph, complement

DEFAULT_A = 1
DEFAULT_B = 2

Pair = tuple[int, int]


def _check_pairs(num_vars: int, linear: Mapping[int, float], quadratic: Mapping[Pair, float]):
    for i in linear:
        if not 0 <= i < num_vars:
            raise DomainError(f"linear index {i} outside 0..{num_vars - 1}")
    for i, j in quadratic:
        if i == j:
            raise DomainError(f"quadratic key ({i}, {j}) repeats a variable")
        if not (0 <= i < num_vars and 0 <= j < num_vars):
            raise DomainError(f"quadratic key ({i}, {j}) outside 0..{num_vars - 1}")


def _canonical(quadratic: Mapping[Pair, float]) -> dict[Pair, float]:
    out: dict[Pair, float] = {}
    for (i, j), w in quadratic.items():
        key = (i, j) if i < j else (j, i)
        out[key] = out.get(key, 0) + w
    return out


@dataclass(frozen=True)
class QuboModel:
    num_vars: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[Pair, float] = field(default_factory=dict)
    offset: float = 0
    penalty_a: float = DEFAULT_A
    penalty_b: float = DEFAULT_B

    def __post_init__(self):
        _check_pairs(self.num_vars, self.linear, self.quadratic)
        object.__setattr__(self, "quadratic", _canonical(self.quadratic))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense linear vector and symmetric zero-diagonal coupling matrix."""
        lin = np.zeros(self.num_vars)
        for i, w in self.linear.items():
            lin[i] = w
        quad = np.zeros((self.num_vars, self.num_vars))
        for (i, j), w in self.quadratic.items():
            quad[i, j] = quad[j, i] = w
        return lin, quad

    def conflict_graph(self) -> Graph:
        """Graph whose edges are the positively weighted couplings."""
        return Graph(self.num_vars, [k for k, w in self.quadratic.items() if w > 0])

    def to_record(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "linear": {str(i): w for i, w in sorted(self.linear.items())},
            "quadratic": [[i, j, w] for (i, j), w in sorted(self.quadratic.items())],
            "offset": self.offset,
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "QuboModel":
        return cls(
            num_vars=rec["num_vars"],
            linear={int(i): w for i, w in rec["linear"].items()},
            quadratic={(int(i), int(j)): w for i, j, w in rec["quadratic"]},
            offset=rec["offset"],
        )


@dataclass(frozen=True)
class IsingModel:
    """Spin model ``offset + sum h_i s_i + sum J_ij s_i s_j`` over ``s_i = +-1``."""

    num_vars: int
    h: dict[int, float] = field(default_factory=dict)
    j: dict[Pair, float] = field(default_factory=dict)
    offset: float = 0

    def __post_init__(self):
        _check_pairs(self.num_vars, self.h, self.j)
        object.__setattr__(self, "j", _canonical(self.j))


def build_is_qubo(g: Graph, a: float = DEFAULT_A, b: float = DEFAULT_B) -> QuboModel:
    if not (b > a > 0):
        raise PenaltyConfigError(f"need b > a > 0, got a={a}, b={b}")
    return QuboModel(
        num_vars=g.vertex_count,
        linear={i: -a for i in g.vertices()},
        quadratic={e: b for e in g.sorted_edges()},
        offset=0,
        penalty_a=a,
        penalty_b=b,
    )


def build_mc_qubo(g: Graph, a: float = DEFAULT_A, b: float = DEFAULT_B) -> QuboModel:
    return build_is_qubo(complement(g), a, b)


def evaluate(m: QuboModel, x: Sequence[int]) -> float:
    if len(x) != m.num_vars:
        raise DimensionError(f"assignment has length {len(x)}, model has {m.num_vars} variables")
    total = m.offset
    for i, w in m.linear.items():
        if x[i]:
            total += w
    for (i, j), w in m.quadratic.items():
        if x[i] and x[j]:
            total += w
    return total


def evaluate_many(m: QuboModel, xs: np.ndarray) -> np.ndarray:
    """Energies of a batch of assignments, one per row of ``xs``."""
    xs = np.asarray(xs)
    if xs.ndim != 2 or xs.shape[1] != m.num_vars:
        raise DimensionError(f"expected shape (k, {m.num_vars}), got {xs.shape}")
    lin, quad = m.arrays()
    xf = xs.astype(float)
    return m.offset + xf @ lin + 0.5 * np.einsum("ri,ij,rj->r", xf, quad, xf)


def qubo_to_ising(m: QuboModel) -> IsingModel:
    # x_i = (1 + s_i) / 2
    h = {i: w / 2 for i, w in m.linear.items()}
    j: dict[Pair, float] = {}
    offset = m.offset + sum(m.linear.values()) / 2
    for (u, v), w in m.quadratic.items():
        j[(u, v)] = w / 4
        h[u] = h.get(u, 0) + w / 4
        h[v] = h.get(v, 0) + w / 4
        offset += w / 4
    return IsingModel(num_vars=m.num_vars, h=h, j=j, offset=offset)


def ising_energy(im: IsingModel, spins: Sequence[int]) -> float:
    if len(spins) != im.num_vars:
        raise DimensionError(f"spin vector has length {len(spins)}, model has {im.num_vars}")
    total = im.offset
    for i, w in im.h.items():
        total += w * spins[i]
    for (u, v), w in im.j.items():
        total += w * spins[u] * spins[v]
    return total


def decode_vertex_set(x: Iterable[int]) -> frozenset[int]:
    return frozenset(i for i, bit in enumerate(x) if bit)


def _check_members(g: Graph, s: Iterable[int]) -> list[int]:
    members = list(s)
    for v in members:
        if not 0 <= v < g.vertex_count:
            raise DomainError(f"vertex {v} outside 0..{g.vertex_count - 1}")
    return members


def is_independent_set(g: Graph, s: Iterable[int]) -> bool:
    members = _check_members(g, s)
    return not any(g.has_edge(u, v) for k, u in enumerate(members) for v in members[k + 1:])


def is_clique(g: Graph, s: Iterable[int]) -> bool:
    members = _check_members(g, s)
    return all(g.has_edge(u, v) for k, u in enumerate(members) for v in members[k + 1:])

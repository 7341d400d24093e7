"""Exact clique oracle, simulated-annealing sampler and the annealer client gate.

The annealer client stands in for quantum hardware: models larger than
``max_variables`` (164, the largest graph the hardware embeds) are refused
before any sampling happens.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from ._rng import derive_seed, make_rng
from .errors import EmbeddingLimitError, LabError, SizeLimitError
from .graph import Graph, complement
from .qubo import QuboModel, build_mc_qubo, decode_vertex_set, evaluate_many

EMBEDDING_LIMIT = 164
ORACLE_LIMIT = 64


# -- exact oracle -----------------------------------------------------------

def _masks(g: Graph) -> list[int]:
    return [sum(1 << u for u in g.neighbors(v)) for v in g.vertices()]


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Reached(Exception):
    pass


def _max_clique_size(adj: Sequence[int], cand: int, target: int | None = None) -> int:
    """Clique number of the subgraph induced by ``cand``.

    Bron-Kerbosch with Tomita pivoting and a size bound. With ``target``
    the search stops as soon as a clique of that size is seen.
    """
    best = 0

    def expand(size: int, p: int, x: int) -> None:
        nonlocal best
        if not p:
            if size > best:
                best = size
                if target is not None and best >= target:
                    raise _Reached
            return
        if size + p.bit_count() <= best:
            return
        pivot = max(_bits(p | x), key=lambda u: (p & adj[u]).bit_count())
        for v in _bits(p & ~adj[pivot]):
            expand(size + 1, p & adj[v], x & adj[v])
            p &= ~(1 << v)
            x |= 1 << v
            if size + p.bit_count() <= best:
                return

    try:
        expand(0, cand, 0)
    except _Reached:
        pass
    return best


def exact_max_clique(g: Graph) -> frozenset[int]:
    """Lexicographically smallest maximum clique of ``g`` (N <= 64)."""
    n = g.vertex_count
    if n > ORACLE_LIMIT:
        raise SizeLimitError(f"exact oracle accepts at most {ORACLE_LIMIT} vertices, got {n}")
    if n == 0:
        return frozenset()
    adj = _masks(g)
    omega = _max_clique_size(adj, (1 << n) - 1)
    chosen: list[int] = []
    cand = (1 << n) - 1
    for v in range(n):
        if len(chosen) == omega:
            break
        if not cand >> v & 1:
            continue
        # v is kept if the remaining slots can be filled from higher labels
        need = omega - len(chosen) - 1
        rest = cand & adj[v] & ~((1 << (v + 1)) - 1)
        if need == 0 or _max_clique_size(adj, rest, target=need) >= need:
            chosen.append(v)
            cand = rest
    return frozenset(chosen)


def exact_max_independent_set(g: Graph) -> frozenset[int]:
    if g.vertex_count > ORACLE_LIMIT:
        raise SizeLimitError(
            f"exact oracle accepts at most {ORACLE_LIMIT} vertices, got {g.vertex_count}"
        )
    return exact_max_clique(complement(g))


def clique_number(g: Graph) -> int:
    if g.vertex_count > ORACLE_LIMIT:
        raise SizeLimitError(
            f"exact oracle accepts at most {ORACLE_LIMIT} vertices, got {g.vertex_count}"
        )
    return _max_clique_size(_masks(g), (1 << g.vertex_count) - 1)


# -- repair -----------------------------------------------------------------

def repair_to_independent_set(g: Graph, s: Iterable[int]) -> frozenset[int]:
    """Drop the most-conflicted vertex until ``s`` is independent in ``g``.

    Ties go to the highest label, so the lowest labels survive.
    """
    keep = set(s)
    while True:
        worst, worst_count = -1, 0
        for v in sorted(keep):
            c = len(g.neighbors(v) & keep)
            if c >= worst_count and c > 0:
                worst, worst_count = v, c
        if worst < 0:
            return frozenset(keep)
        keep.remove(worst)


def repair_to_clique(g: Graph, s: Iterable[int]) -> frozenset[int]:
    return repair_to_independent_set(complement(g), s)


# -- simulated annealing ------------------------------------------------------

@dataclass(frozen=True)
class AnnealConfig:
    num_reads: int = 100
    sweeps_per_read: int = 2000
    beta_initial: float = 0.05
    beta_final: float = 12.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1:
            raise LabError(f"num_reads must be >= 1, got {self.num_reads}")
        if self.sweeps_per_read < 1:
            raise LabError(f"sweeps_per_read must be >= 1, got {self.sweeps_per_read}")
        if not 0 < self.beta_initial < self.beta_final:
            raise LabError(
                f"need 0 < beta_initial < beta_final, got {self.beta_initial}, {self.beta_final}"
            )

    def betas(self) -> np.ndarray:
        """Geometric inverse-temperature schedule, one value per sweep."""
        if self.sweeps_per_read == 1:
            return np.array([self.beta_final])
        return np.geomspace(self.beta_initial, self.beta_final, self.sweeps_per_read)


@dataclass(frozen=True)
class SampleOutcome:
    raw_assignment: tuple[int, ...]
    decoded_set: frozenset[int]
    repaired_set: frozenset[int]
    energy: float
    valid: bool
    is_null: bool
    reads_used: int
    seed: int

    def to_record(self) -> dict:
        return {
            "seed": self.seed,
            "energy": self.energy,
            "set": sorted(self.repaired_set),
            "valid": self.valid,
            "is_null": self.is_null,
        }


@njit(cache=True, nogil=True)
def _anneal_read(lin, quad, x0, betas, uniforms):
    n = lin.shape[0]
    x = x0.copy()
    field = lin.copy()
    for i in range(n):
        if x[i]:
            for k in range(n):
                field[k] += quad[i, k]
    for s in range(betas.shape[0]):
        beta = betas[s]
        for i in range(n):
            delta = field[i] if x[i] == 0 else -field[i]
            if delta <= 0.0 or uniforms[s, i] < math.exp(-beta * delta):
                step = 1 - 2 * x[i]
                x[i] += step
                for k in range(n):
                    field[k] += step * quad[i, k]
    return x


def _one_read(lin, quad, betas, seed: int) -> np.ndarray:
    rng = make_rng(seed)
    n = lin.shape[0]
    x0 = rng.integers(0, 2, size=n).astype(np.int64)
    uniforms = rng.random((betas.shape[0], n))
    return _anneal_read(lin, quad, x0, betas, uniforms)


def read_seed(rng_seed: int, read_index: int) -> int:
    return derive_seed("anneal-read", rng_seed, read_index)


def anneal_sample(
    m: QuboModel,
    cfg: AnnealConfig,
    max_variables: int = EMBEDDING_LIMIT,
    workers: int = 1,
) -> list[SampleOutcome]:
    """Sample ``m`` with single-spin-flip Metropolis annealing.

    Each read owns a Philox stream keyed by its own seed, so results do not
    depend on ``workers``. Decoded sets are repaired against the model's
    conflict graph (its positive couplings). Outcomes are sorted by energy,
    ties kept in read order.
    """
    if m.num_vars > max_variables:
        raise EmbeddingLimitError(
            f"model has {m.num_vars} variables, the annealer embeds at most {max_variables}"
        )
    lin, quad = m.arrays()
    betas = cfg.betas()
    seeds = [read_seed(cfg.rng_seed, r) for r in range(cfg.num_reads)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            finals = list(pool.map(lambda s: _one_read(lin, quad, betas, s), seeds))
    else:
        finals = [_one_read(lin, quad, betas, s) for s in seeds]
    xs = np.array(finals, dtype=np.int64).reshape(cfg.num_reads, m.num_vars)
    energies = evaluate_many(m, xs)
    conflicts = m.conflict_graph()
    outcomes = []
    for x, e, seed in zip(xs, energies, seeds):
        decoded = decode_vertex_set(x)
        repaired = repair_to_independent_set(conflicts, decoded)
        outcomes.append(SampleOutcome(
            raw_assignment=tuple(int(b) for b in x),
            decoded_set=decoded,
            repaired_set=repaired,
            energy=float(e),
            valid=repaired == decoded,
            is_null=not repaired,
            reads_used=1,
            seed=seed,
        ))
    outcomes.sort(key=lambda o: o.energy)
    return outcomes


class AnnealerClient(ABC):
    """Something that samples QUBO models under an embedding limit."""

    max_variables: int = EMBEDDING_LIMIT

    def check(self, m: QuboModel) -> None:
        if m.num_vars > self.max_variables:
            raise EmbeddingLimitError(
                f"model has {m.num_vars} variables, the annealer embeds at most "
                f"{self.max_variables}"
            )

    @abstractmethod
    def sample(self, m: QuboModel, cfg: AnnealConfig) -> list[SampleOutcome]:
        ...


class LocalAnnealerClient(AnnealerClient):
    def __init__(self, max_variables: int = EMBEDDING_LIMIT, workers: int = 1):
        if not 1 <= max_variables <= EMBEDDING_LIMIT:
            raise EmbeddingLimitError(
                f"max_variables must lie in 1..{EMBEDDING_LIMIT}, got {max_variables}"
            )
        self.max_variables = max_variables
        self.workers = workers

    def sample(self, m: QuboModel, cfg: AnnealConfig) -> list[SampleOutcome]:
        self.check(m)
        return anneal_sample(m, cfg, self.max_variables, self.workers)


def best_clique_outcome(outcomes: Sequence[SampleOutcome]) -> SampleOutcome:
    """Largest repaired set, then lowest energy, then earliest position."""
    ranked = sorted(enumerate(outcomes), key=lambda p: (-len(p[1].repaired_set), p[1].energy, p[0]))
    return ranked[0][1]


def solve_max_clique(g: Graph, client: AnnealerClient, cfg: AnnealConfig) -> SampleOutcome:
    """Sample the clique QUBO of ``g`` and keep the largest repaired clique.

    Repair is redone against the complement of ``g`` here, so clients that
    return unrepaired assignments are handled the same way.
    """
    model = build_mc_qubo(g)
    client.check(model)
    comp = complement(g)
    outcomes = []
    for o in client.sample(model, cfg):
        repaired = repair_to_independent_set(comp, o.decoded_set)
        outcomes.append(replace(
            o, repaired_set=repaired, valid=repaired == o.decoded_set, is_null=not repaired
        ))
    best = best_clique_outcome(outcomes)
    return replace(best, reads_used=cfg.num_reads)

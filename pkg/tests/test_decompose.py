import time

import pytest

from cliquelab._rng import make_rng
from cliquelab.decompose import (
    GUARD_BLOCKED,
    NO_CANDIDATE,
    REACHED_FINAL_DIM,
    DecomposeConfig,
    decompose_is,
    find_max_degree_removable,
    find_random_removable,
    guard_allows_removal,
)
from cliquelab.errors import LabError
from cliquelab.graph import Graph, complement, greedy_chromatic_upper_bound
from cliquelab.solvers import clique_number

from conftest import corpus


def replay(g: Graph, trace):
    """Re-apply the trace removals one at a time, checking each step."""
    adj = [set(a) for a in g.adjacency]
    alive = set(g.vertices())
    protected = set()
    for v in trace.removed_vertices:
        assert v in alive and v not in protected
        nbrs = sorted(adj[v])
        pairs = [(a, b) for i, a in enumerate(nbrs) for b in nbrs[i + 1:] if b not in adj[a]]
        assert pairs, f"vertex {v} had no non-adjacent neighbor pair"
        for u in adj[v]:
            adj[u].discard(v)
        adj[v] = set()
        alive.discard(v)
        protected.update(pairs[0])
    return alive, protected


class TestExamples:
    def test_hub_removed_first(self, hub_graph):
        cfg = DecomposeConfig(final_dim=4, min_cn=1, deterministic=True)
        out, trace = decompose_is(hub_graph, cfg)
        assert trace.removed_vertices == [0]
        assert trace.protected_vertices == {1, 2}
        assert trace.stop_reason == REACHED_FINAL_DIM
        assert out.vertex_count == 4

    def test_hub_triples_are_valid(self, hub_graph):
        adj = hub_graph.adjacency
        for v, a, b in [(0, 1, 2), (0, 1, 4), (0, 2, 3)]:
            assert a in adj[v] and b in adj[v] and b not in adj[a]
        assert find_max_degree_removable(hub_graph, set(), 1) == (0, 1, 2)

    def test_random_tie_break_still_takes_hub(self, hub_graph):
        for seed in range(10):
            _, trace = decompose_is(hub_graph, DecomposeConfig(4, 1, rng_seed=seed))
            assert trace.removed_vertices == [0]

    def test_complete_graph_untouched(self):
        g = Graph.complete(7)
        out, trace = decompose_is(g, DecomposeConfig(final_dim=2, min_cn=1))
        assert out == g and trace.stop_reason == NO_CANDIDATE
        assert not trace.removed_vertices

    def test_edgeless_graph_untouched(self):
        g = Graph.empty(6)
        out, trace = decompose_is(g, DecomposeConfig(final_dim=2, min_cn=1))
        assert out == g and trace.stop_reason == NO_CANDIDATE

    def test_final_dim_too_large(self):
        with pytest.raises(LabError):
            decompose_is(Graph.path(3), DecomposeConfig(final_dim=4, min_cn=1))

    def test_config_validation(self):
        for kw in ({"final_dim": 0, "min_cn": 1}, {"final_dim": 1, "min_cn": 0},
                   {"final_dim": 1, "min_cn": 1, "max_triple_depth": 0}):
            with pytest.raises(LabError):
                DecomposeConfig(**kw)

    def test_guard_blocked(self):
        # C5 is self-complementary; any removal leaves a path needing 2 colors
        out, trace = decompose_is(Graph.cycle(5), DecomposeConfig(final_dim=1, min_cn=3))
        assert trace.stop_reason == GUARD_BLOCKED and out == Graph.cycle(5)


class TestFinders:
    def test_star_center(self):
        v, a, b = find_max_degree_removable(Graph.star(4), set(), 1)
        assert v == 0 and {a, b} <= {1, 2, 3, 4} and a != b

    def test_k4_none(self):
        assert find_max_degree_removable(Graph.complete(4), set(), 1) is None
        assert find_random_removable(Graph.complete(4), set(), 1, 50, make_rng(0)) is None

    def test_protected_skipped(self):
        assert find_max_degree_removable(Graph.star(4), {0}, 1) is None

    def test_depth_limits_degree_classes(self):
        # 0-3 form a K4 (top degree class); only path center 5 has a split pair
        g = Graph(7, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5), (5, 6)])
        assert find_max_degree_removable(g, set(), 1, depth=1) is None
        assert find_max_degree_removable(g, set(), 1, depth=3) == (5, 4, 6)

    def test_random_star(self):
        found = find_random_removable(Graph.star(4), set(), 1, 1, make_rng(11))
        assert found is not None and found[0] == 0

    def test_random_single_triple(self):
        # P3 plus a disjoint triangle: (1, 0, 2) is the only valid triple
        g = Graph(6, [(0, 1), (1, 2), (3, 4), (3, 5), (4, 5)])
        assert find_random_removable(g, set(), 1, 1000, make_rng(5)) == (1, 0, 2)

    def test_random_budget_validated(self):
        with pytest.raises(LabError):
            find_random_removable(Graph.star(3), set(), 1, 0, make_rng(0))


class TestGuard:
    def test_zero_threshold(self):
        for g in corpus(20, (1, 10), seed=3):
            assert all(guard_allows_removal(g, v, 0) for v in g.vertices())

    def test_threshold_above_n(self):
        for g in corpus(20, (1, 10), seed=4):
            n = g.vertex_count
            assert not any(guard_allows_removal(g, v, n + 1) for v in g.vertices())

    def test_edgeless_five(self):
        assert not any(guard_allows_removal(Graph.empty(5), v, 5) for v in range(5))
        assert all(guard_allows_removal(Graph.empty(5), v, 4) for v in range(5))

    def test_matches_definition(self):
        for g in corpus(40, (2, 12), seed=6):
            for v in g.vertices():
                sub, _ = g.induced_subgraph([u for u in g.vertices() if u != v])
                bound = greedy_chromatic_upper_bound(complement(sub))
                assert guard_allows_removal(g, v, 3) == (bound >= 3)


class TestInvariants:
    def test_corpus_loop_bound_and_structure(self):
        for k, g in enumerate(corpus(1000, (1, 20), seed=19)):
            n = g.vertex_count
            cfg = DecomposeConfig(final_dim=max(1, n // 3), min_cn=1, rng_seed=k)
            out, trace = decompose_is(g, cfg)
            assert trace.iterations <= 2 * n
            alive, protected = replay(g, trace)
            assert set(trace.kept_vertices) == alive
            assert not protected & set(trace.removed_vertices)
            assert out.vertex_count >= cfg.final_dim or trace.stop_reason != REACHED_FINAL_DIM
            sub, _ = g.induced_subgraph(trace.kept_vertices)
            assert out == sub

    def test_guard_threshold_respected(self):
        for k, g in enumerate(corpus(100, (3, 16), seed=23)):
            min_cn = clique_number(complement(g))
            out, trace = decompose_is(g, DecomposeConfig(1, min_cn, rng_seed=k))
            assert greedy_chromatic_upper_bound(complement(out)) >= min_cn

    def test_determinism(self):
        g = corpus(1, (25, 25), seed=8)[0]
        cfg = DecomposeConfig(final_dim=5, min_cn=2, rng_seed=99)
        assert decompose_is(g, cfg) == decompose_is(g, cfg)

    def test_preservation_rate(self):
        graphs = corpus(200, (5, 30), p_range=(0.2, 0.8), seed=77)
        kept = 0
        for k, g in enumerate(graphs):
            mis = clique_number(complement(g))
            out, _ = decompose_is(g, DecomposeConfig(final_dim=1, min_cn=mis, rng_seed=k))
            kept += clique_number(complement(out)) == mis
        rate = kept / len(graphs)
        print(f"maximum independent set preserved in {rate:.1%} of graphs")
        assert rate >= 0.70

    def test_complete_60_is_fast(self):
        start = time.perf_counter()
        decompose_is(Graph.complete(60), DecomposeConfig(final_dim=1, min_cn=1))
        assert time.perf_counter() - start < 10.0

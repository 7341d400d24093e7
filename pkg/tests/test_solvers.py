from itertools import product

import pytest

from cliquelab.benchgen import GraphRecipe, graph_creation
from cliquelab.errors import EmbeddingLimitError, LabError, SizeLimitError
from cliquelab.graph import Graph
from cliquelab.qubo import QuboModel, build_is_qubo, evaluate, is_clique, is_independent_set
from cliquelab.solvers import (
    AnnealConfig,
    AnnealerClient,
    LocalAnnealerClient,
    SampleOutcome,
    anneal_sample,
    best_clique_outcome,
    clique_number,
    exact_max_clique,
    exact_max_independent_set,
    repair_to_clique,
    repair_to_independent_set,
    solve_max_clique,
)

from conftest import brute_clique_number, brute_independent_sets, corpus, random_graph

FAST = AnnealConfig(num_reads=20, sweeps_per_read=300, beta_initial=0.1, beta_final=8.0, rng_seed=3)


class TestOracle:
    def test_k4_plus_isolated(self):
        g = Graph(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        assert exact_max_clique(g) == {0, 1, 2, 3}

    def test_petersen(self):
        c = exact_max_clique(Graph.petersen())
        assert len(c) == 2 and is_clique(Graph.petersen(), c)

    def test_c5(self):
        assert len(exact_max_clique(Graph.cycle(5))) == 2

    def test_mis_examples(self):
        assert len(exact_max_independent_set(Graph.complete(5))) == 1
        assert exact_max_independent_set(Graph.empty(6)) == set(range(6))
        assert exact_max_independent_set(Graph.path(4)) == {0, 2}

    def test_empty_input(self):
        assert exact_max_clique(Graph.empty(0)) == frozenset()

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            exact_max_clique(Graph.empty(65))
        with pytest.raises(SizeLimitError):
            clique_number(Graph.empty(65))
        assert clique_number(Graph.complete(64)) == 64

    def test_lexicographic_tie_break(self):
        for g in corpus(100, (1, 10), seed=44):
            size, sets = brute_independent_sets(g)
            lex = min(sorted(s) for s in sets)
            assert sorted(exact_max_independent_set(g)) == lex

    def test_brute_force_cross_check(self):
        for g in corpus(300, (1, 14), seed=13):
            c = exact_max_clique(g)
            assert is_clique(g, c)
            assert len(c) == clique_number(g) == brute_clique_number(g)


class TestRepair:
    def test_independent_input_unchanged(self):
        assert repair_to_independent_set(Graph.path(4), {0, 2}) == {0, 2}

    def test_k3(self):
        assert repair_to_independent_set(Graph.complete(3), {0, 1, 2}) == {0}

    def test_p3(self):
        assert repair_to_independent_set(Graph.path(3), {0, 1, 2}) == {0, 2}

    def test_clique_repair(self):
        assert repair_to_clique(Graph.path(3), {0, 1, 2}) == {0, 1}

    def test_always_valid_subset(self):
        for k, g in enumerate(corpus(200, (1, 16), seed=15)):
            s = set(random_graph(g.vertex_count, 0.5, k).vertices()[::2])
            r = repair_to_independent_set(g, s)
            assert r <= s and is_independent_set(g, r)


class TestAnneal:
    def test_config_validation(self):
        with pytest.raises(LabError):
            AnnealConfig(num_reads=0)
        with pytest.raises(LabError):
            AnnealConfig(beta_initial=2.0, beta_final=1.0)
        betas = AnnealConfig(sweeps_per_read=5, beta_initial=1, beta_final=16).betas()
        assert list(betas) == pytest.approx([1, 2, 4, 8, 16])

    def test_empty_graph_model(self):
        out = anneal_sample(build_is_qubo(Graph.empty(5)), FAST)
        assert out[0].raw_assignment == (1,) * 5 and out[0].energy == -5

    def test_p3_model(self):
        cfg = AnnealConfig(num_reads=50, sweeps_per_read=500, beta_initial=0.1, beta_final=10, rng_seed=7)
        out = anneal_sample(build_is_qubo(Graph.path(3)), cfg)
        assert out[0].repaired_set == {0, 2}

    def test_gate(self):
        big = QuboModel(165)
        with pytest.raises(EmbeddingLimitError):
            anneal_sample(big, FAST)
        with pytest.raises(EmbeddingLimitError):
            LocalAnnealerClient().sample(big, FAST)
        out = LocalAnnealerClient().sample(QuboModel(164, {0: -1.0}), AnnealConfig(1, 2))
        assert len(out) == 1

    def test_client_limit_validated(self):
        with pytest.raises(EmbeddingLimitError):
            LocalAnnealerClient(max_variables=165)
        small = LocalAnnealerClient(max_variables=4)
        with pytest.raises(EmbeddingLimitError):
            small.sample(build_is_qubo(Graph.empty(5)), FAST)

    def test_outcome_invariants(self):
        g = random_graph(18, 0.5, 2)
        m = build_is_qubo(g)
        out = anneal_sample(m, FAST)
        assert len(out) == FAST.num_reads
        energies = [o.energy for o in out]
        assert energies == sorted(energies)
        for o in out:
            assert o.repaired_set <= o.decoded_set
            assert is_independent_set(g, o.repaired_set)
            assert o.valid == (o.repaired_set == o.decoded_set)
            assert o.is_null == (not o.repaired_set)
            assert o.energy == evaluate(m, o.raw_assignment)

    def test_determinism_and_worker_invariance(self):
        m = build_is_qubo(random_graph(25, 0.4, 6))
        a = anneal_sample(m, FAST)
        assert anneal_sample(m, FAST) == a
        assert anneal_sample(m, FAST, workers=4) == a

    def test_seed_changes_output(self):
        m = build_is_qubo(random_graph(25, 0.4, 6))
        a = anneal_sample(m, FAST)
        b = anneal_sample(m, AnnealConfig(20, 300, 0.1, 8.0, rng_seed=4))
        assert [o.raw_assignment for o in a] != [o.raw_assignment for o in b]

    def test_small_models_reach_ground_state(self):
        for g in corpus(30, (1, 10), seed=50):
            m = build_is_qubo(g)
            low = min(evaluate(m, bits) for bits in product((0, 1), repeat=g.vertex_count))
            assert anneal_sample(m, FAST)[0].energy == low


class _Scripted(AnnealerClient):
    """Returns fixed decoded sets without repairing them."""

    def __init__(self, sets):
        self.sets = sets

    def sample(self, m, cfg):
        self.check(m)
        out = []
        for k, s in enumerate(self.sets):
            x = tuple(int(v in s) for v in range(m.num_vars))
            out.append(SampleOutcome(x, frozenset(s), frozenset(s), evaluate(m, x), True, not s, 1, k))
        return out


class TestSolveMaxClique:
    def test_k3(self):
        best = solve_max_clique(Graph.complete(3), LocalAnnealerClient(), FAST)
        assert best.repaired_set == {0, 1, 2} and not best.is_null

    def test_planted_bench_graph(self):
        bench = graph_creation(GraphRecipe(n_node=8, ex_node=12, rng_seed=5))
        best = solve_max_clique(bench.graph, LocalAnnealerClient(), AnnealConfig(rng_seed=1))
        assert is_clique(bench.graph, best.repaired_set)
        assert len(best.repaired_set) == 8 == bench.planted_max_size
        assert best.reads_used == 100

    def test_client_output_is_repaired_against_graph(self):
        g = Graph.path(4)
        best = solve_max_clique(g, _Scripted([{0, 1, 2, 3}, {2}]), FAST)
        assert is_clique(g, best.repaired_set) and len(best.repaired_set) == 2
        assert not best.valid

    def test_null_when_everything_empty(self):
        best = solve_max_clique(Graph.path(4), _Scripted([set(), set()]), FAST)
        assert best.is_null and best.repaired_set == frozenset()

    def test_gate_applies(self):
        with pytest.raises(EmbeddingLimitError):
            solve_max_clique(Graph.empty(165), LocalAnnealerClient(), FAST)

    def test_best_outcome_ranking(self):
        mk = lambda s, e: SampleOutcome((), frozenset(s), frozenset(s), e, True, not s, 1, 0)
        outs = [mk({1}, -5.0), mk({1, 2}, -1.0), mk({3, 4}, -2.0)]
        assert best_clique_outcome(outs) is outs[2]

"""Tests for the recursive engine, compressed clusters and the dynamic facade"""

import random
from fractions import Fraction

import pytest
from hypothesis import given

from dynmsf.decomposition import Cluster, DecompositionParams, Hierarchy
from dynmsf.dynamic_msf import (
    EDGE_HANGING,
    EDGE_MOVED,
    EDGE_PLAIN,
    DynamicMsf,
    Engine,
    EngineParams,
    Failure,
    compressed_cluster,
    deletion_bound,
)
from dynmsf.exceptions import BudgetExhausted, InputError, StateError
from dynmsf.graph_core import Graph
from dynmsf.harness import EngineChoice, generate_graph, generate_trace, verify
from dynmsf.msf_support import MsfDelta, kruskal

from .strategies import PROPERTY_SETTINGS, apply_updates, updates, weighted_graphs


def delete_some(g: Graph, engine: Engine, count: int, seed: int = 0) -> None:
    """Delete random alive edges from g and the engine, checking against Kruskal"""
    rng = random.Random(seed)
    for _ in range(count):
        alive = sorted(g.edges())
        if not alive:
            return
        eid = rng.choice(alive)
        g.delete_edge(eid)
        result = engine.delete(eid)
        assert isinstance(result, MsfDelta)
        assert engine.forest_edges() == kruskal(g)


class TestParams:
    def test_create(self):
        params = EngineParams.create(1024, 1536)
        assert params.gamma == 4
        assert params.alpha == Fraction(1, 64)
        assert params.d == 4
        assert params.s_low == 4
        assert params.s_high == 256
        assert params.alpha0 == Fraction(1, 256)
        assert params.pi == 8
        assert params.batch_size == 32
        assert params.deletion_budget == 4
        assert params.sketch_bound(1024) == 1024

    def test_overrides(self, configure):
        configure(engine={"gamma_override": 5, "alpha0_override": "1/10"})
        params = EngineParams.create(64, 96)
        assert params.gamma == 5
        assert params.alpha0 == Fraction(1, 10)

    def test_deletion_bound_below_threshold(self):
        assert deletion_bound(100) == 100


class TestBaseCase:
    def test_triangle(self):
        g = Graph.from_edges(3, [(0, 1, 3), (1, 2, 1), (0, 2, 2)])
        engine = Engine(g)
        assert engine.hierarchy is None
        assert engine.forest_edges() == frozenset({1, 2})
        assert engine.delete(1) == MsfDelta(removed=(1,), added=(0,))
        assert g.num_edges() == 3
        stats = engine.stats()
        assert stats["base_case"] is True
        assert stats["deletions"] == 1

    def test_delete_between(self):
        g = Graph.from_edges(3, [(0, 1, 3), (1, 2, 1), (0, 2, 2)])
        engine = Engine(g)
        engine.delete_between(2, 1)
        assert not engine.graph.is_alive(1)
        with pytest.raises(InputError):
            engine.delete_between(1, 2)
        with pytest.raises(InputError):
            engine.delete(1)

    def test_high_degree_graph(self):
        star = [(0, v, v) for v in range(1, 6)]
        g = Graph.from_edges(6, star + [(1, 2, 9), (3, 4, 8)])
        engine = Engine(g)
        assert engine.forest_edges() == kruskal(g)
        delete_some(g, engine, 7)


class TestRecursiveEngine:
    def build(self, seed: int = 0):
        g = generate_graph("random-3-regular", 64, seed)
        return g, Engine(g)

    def test_preprocessing(self, recursive_settings):
        g, engine = self.build()
        assert engine.hierarchy is not None
        assert engine.params is not None
        assert engine.params.gamma == 3
        assert engine.params.deletion_budget == 3
        assert engine.forest_edges() == kruskal(g)
        stats = engine.stats()
        assert stats["base_case"] is False
        assert stats["hierarchy"]["clusters"] == len(engine.hierarchy.clusters)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [0, 1])
    def test_deletions_match_kruskal(self, recursive_settings, seed):
        g, engine = self.build(seed)
        delete_some(g, engine, 20, seed)
        stats = engine.stats()
        assert stats["restarts"] >= 1
        assert stats["deletions"] == 20

    def test_injected_failure_restarts(self, recursive_settings):
        g, engine = self.build()
        engine.inject_failure()
        delete_some(g, engine, 1)
        stats = engine.stats()
        assert stats["failures"] == {"injected": 1}
        assert stats["restarts"] == 1

    def test_failure_without_restart(self, recursive_settings):
        g = generate_graph("random-3-regular", 64, 0)
        engine = Engine(g, auto_restart=False)
        engine.inject_failure("forced")
        eid = sorted(g.edges())[0]
        g.delete_edge(eid)
        assert engine.delete(eid) == Failure("forced")
        with pytest.raises(StateError):
            engine.delete(sorted(g.edges())[0])
        engine.restart()
        assert engine.forest_edges() == kruskal(g)
        delete_some(g, engine, 2)

    def test_budget_exhausted(self, recursive_settings):
        g = generate_graph("random-3-regular", 64, 0)
        engine = Engine(g, auto_restart=False)
        delete_some(g, engine, 3)
        with pytest.raises(BudgetExhausted):
            engine.delete(sorted(g.edges())[0])
        engine.restart()
        delete_some(g, engine, 1)

    def test_default_settings_build_a_hierarchy(self):
        g = generate_graph("random-3-regular", 256, 0)
        engine = Engine(g)
        stats = engine.stats()
        assert stats["base_case"] is False
        assert stats["hierarchy"]["clusters"] >= 2
        assert stats["params"]["gamma"] == 3
        assert stats["sketch"]["bound"] is not None
        assert engine.forest_edges() == kruskal(g)

    def test_large_children_are_compressed(self, configure):
        configure(engine={"gamma_override": 5, "max_depth": 1, "min_budget": 1})
        g = generate_graph("random-3-regular", 256, 0)
        engine = Engine(g)
        stats = engine.stats()
        assert stats["params"]["d"] == 5
        assert stats["hierarchy"]["pieces"] > 0
        assert stats["hierarchy"]["super_nodes"] > 0
        own = stats["hierarchy"]["own_edges"]
        assert own["hanging"] + own["super"] + own["loop"] > 0
        delete_some(g, engine, 12, seed=5)
        assert engine.stats()["deletions"] == 12


def hand_hierarchy(large_child: bool = False) -> Hierarchy:
    """Path 0-1-2-3; the root owns the middle edge, its children own one edge each"""
    g = Graph.from_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 3)])
    root = Cluster(0, 1, None, frozenset(range(4)), frozenset({0, 1, 2}))
    root.own = frozenset({1})
    root.children = [1, 2]
    left = Cluster(1, 2, 0, frozenset({0, 1}), frozenset({0}), own=frozenset({0}))
    left.is_leaf = True
    right = Cluster(2, 2, 0, frozenset({2, 3}), frozenset({2}), own=frozenset({2}))
    right.is_leaf = not large_child
    clusters = [root, left, right]
    params = DecompositionParams(Fraction(1, 8), 3, 2, 1)
    return Hierarchy(clusters, g, frozenset(), (frozenset(range(4)),), params)


class TestCompressedCluster:
    def test_all_small_children(self):
        h = hand_hierarchy()
        view = compressed_cluster(h, h.reweighted, 0, {}, {1: {0}, 2: {2}})
        assert view.kind == {1: EDGE_PLAIN}
        assert view.plain_graph.num_edges() == 3
        assert view.m_small == frozenset({0, 2})

    def test_edge_to_super_node_hangs(self):
        h = hand_hierarchy(large_child=True)
        view = compressed_cluster(h, h.reweighted, 0, {2: 0, 3: 0}, {1: {0}})
        assert view.kind == {1: EDGE_HANGING}
        assert view.hanging_graph.num_edges() == 1
        assert view.covered == {0}
        assert view.super_nodes == {0}

    def test_pruned_endpoint_moves_the_edge(self):
        h = hand_hierarchy(large_child=True)
        view = compressed_cluster(
            h, h.reweighted, 0, {3: 0}, {1: {0}}, removed={2}
        )
        assert view.kind == {1: EDGE_MOVED}

    def test_leaf_is_rejected(self):
        h = hand_hierarchy()
        with pytest.raises(InputError):
            compressed_cluster(h, h.reweighted, 1, {}, {})


class TestDynamicMsf:
    @PROPERTY_SETTINGS
    @given(g=weighted_graphs(max_nodes=8, max_edges=16), ops=updates)
    def test_matches_kruskal_under_updates(self, g, ops):
        msf = DynamicMsf(g)
        assert msf.forest_edges() == kruskal(g)
        apply_updates(g, msf, ops)

    def test_capacity_grows(self):
        g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
        msf = DynamicMsf(g, k=1, batch_size=2)
        delta = msf.insert_batch([(0, 1, 4), (1, 2, 0)])
        assert delta == MsfDelta(removed=(1,), added=(4,))
        assert msf.grows == 1
        assert msf.k == 3
        assert msf.get_info()["grows"] == 1
        assert msf.forest_edges() == kruskal(msf.graph)

    @pytest.mark.slow
    def test_recursive_parts(self, recursive_settings):
        g = generate_graph("random-3-regular", 32, 4)
        msf = DynamicMsf(g)
        rng = random.Random(4)
        weight = g.num_edges() + 1
        for step in range(30):
            alive = sorted(g.edges())
            if step % 3 == 0:
                u, v = rng.sample(range(32), 2)
                eid = g.add_edge(u, v, weight)
                msf.insert(u, v, weight, eid)
                weight += 1
            else:
                eid = rng.choice(alive)
                g.delete_edge(eid)
                msf.delete(eid)
            assert msf.forest_edges() == kruskal(g)


@pytest.mark.slow
class TestAcceptance:
    @pytest.mark.parametrize("n", [64, 256, 1024])
    @pytest.mark.parametrize("seed", range(5))
    def test_streams_match_kruskal(self, n, seed):
        g = generate_graph("random-3-regular", n, seed)
        mixed = verify(g, generate_trace(g, 120, seed), EngineChoice.DYNMSF)
        assert mixed.passed, mixed.to_dict()
        deletions = generate_trace(g, 120, seed, insert_ratio=0.0)
        decremental = verify(g, deletions, EngineChoice.DECREMENTAL)
        assert decremental.passed, decremental.to_dict()

    @pytest.mark.parametrize("n", [256, 1024])
    def test_sketch_stays_sparse(self, n):
        g = generate_graph("random-3-regular", n, 1)
        engine = Engine(g)
        delete_some(g, engine, 40, seed=1)
        sketch = engine.stats()["sketch"]
        churn = engine.stats()["churn"]
        assert sketch["bound"] is not None
        assert sketch["non_tree_max"] <= sketch["bound"]
        assert churn["sketch_deletes_max"] <= 2
        assert churn["sketch_inserts_max"] <= sketch["batch_size"]

"""Tests for union-find, the dynamic forest and the small MSF structures"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmsf.exceptions import InputError
from dynmsf.graph_core import Graph
from dynmsf.msf_support import (
    DynamicForest,
    KruskalReplay,
    MsfDelta,
    MultigraphMsf,
    SCoveredMsf,
    UnionFind,
    forest_delta,
    kruskal,
)

from .strategies import PROPERTY_SETTINGS, apply_updates, updates, weighted_graphs


class TestUnionFind:
    def test_union_and_groups(self):
        sets = UnionFind(range(5))
        assert sets.union(0, 1)
        assert sets.union(3, 4)
        assert not sets.union(1, 0)
        assert sets.connected(0, 1)
        assert not sets.connected(1, 3)
        assert sorted(sorted(g) for g in sets.groups()) == [[0, 1], [2], [3, 4]]

    def test_add_on_demand(self):
        sets = UnionFind()
        sets.union("a", "b")
        assert "a" in sets
        assert sets.find("a") == sets.find("b")


class TestKruskal:
    def test_triangle(self):
        g = Graph.from_edges(3, [(0, 1, 3), (1, 2, 1), (0, 2, 2)])
        assert kruskal(g) == frozenset({1, 2})

    def test_ties_broken_by_id(self):
        g = Graph.from_edges(2, [(0, 1, 5), (0, 1, 5)])
        assert kruskal(g) == frozenset({0})

    def test_restricted_edge_set(self):
        g = Graph.from_edges(3, [(0, 1, 3), (1, 2, 1), (0, 2, 2)])
        assert kruskal(g, [0, 2]) == frozenset({0, 2})


class TestMsfDelta:
    def test_then_cancels_transient_edges(self):
        first = MsfDelta(removed=(1,), added=(2,))
        second = MsfDelta(removed=(2,), added=(3,))
        assert first.then(second) == MsfDelta(removed=(1,), added=(3,))

    def test_forest_delta(self):
        assert forest_delta({1, 2, 3}, {2, 3, 4}) == MsfDelta(removed=(1,), added=(4,))
        assert not forest_delta({1}, {1})


class TestDynamicForest:
    def test_path_max_and_cut(self):
        forest = DynamicForest(4)
        forest.link(0, 1, 10, (5, 10))
        forest.link(1, 2, 11, (9, 11))
        forest.link(2, 3, 12, (2, 12))
        assert forest.connected(0, 3)
        assert forest.path_max(0, 3) == 11
        assert forest.path_max(2, 3) == 12
        assert forest.cut(11) == (1, 2)
        assert not forest.connected(0, 3)
        assert forest.path_max(0, 3) is None
        assert forest.edges() == frozenset({10, 12})

    def test_grows_on_demand(self):
        forest = DynamicForest(0, grow=True)
        forest.link(5, 7, 0, (1, 0))
        assert forest.connected(7, 5)
        assert len(forest) == 1


class TestMultigraphMsf:
    def test_parallel_edges(self):
        g = Graph.from_edges(2, [(0, 1, 3), (0, 1, 1), (0, 1, 2)])
        msf = MultigraphMsf(g)
        assert msf.forest_edges() == frozenset({1})
        assert msf.delete(1) == MsfDelta(removed=(1,), added=(2,))
        assert msf.delete(0) == MsfDelta()
        assert msf.non_tree_edges() == set()

    def test_insert_replaces_path_maximum(self):
        g = Graph.from_edges(3, [(0, 1, 5), (1, 2, 6)])
        msf = MultigraphMsf(g)
        delta = msf.insert(0, 2, 1)
        assert delta == MsfDelta(removed=(1,), added=(2,))
        assert msf.in_forest(2)

    def test_delete_dead_edge(self):
        msf = MultigraphMsf(Graph.from_edges(2, [(0, 1, 1)]))
        msf.delete(0)
        with pytest.raises(InputError):
            msf.delete(0)

    @PROPERTY_SETTINGS
    @given(g=weighted_graphs(max_nodes=8, max_edges=16), ops=updates)
    def test_matches_kruskal_under_updates(self, g, ops):
        msf = MultigraphMsf(g)
        assert msf.forest_edges() == kruskal(g)
        apply_updates(g, msf, ops)


@st.composite
def hub_graphs(draw):
    """Path 1..k plus hub edges from node 0, every hub edge heavier than the path"""
    k = draw(st.integers(2, 8))
    attached = draw(st.lists(st.integers(1, k), min_size=1, unique=True))
    path = [(v, v + 1) for v in range(1, k)]
    path_weights = draw(st.permutations(list(range(1, len(path) + 1))))
    hub_weights = draw(
        st.permutations(list(range(len(path) + 1, len(path) + len(attached) + 1)))
    )
    edges = [(u, v, w) for (u, v), w in zip(path, path_weights)]
    edges += [(0, v, w) for v, w in zip(attached, hub_weights)]
    return Graph.from_edges(k + 1, edges)


class TestSCoveredMsf:
    def hub(self):
        return Graph.from_edges(
            5,
            [(1, 2, 1), (2, 3, 2), (3, 4, 3)]
            + [(0, 1, 10), (0, 2, 11), (0, 3, 12), (0, 4, 13)],
        )

    def test_replacement_from_hub(self):
        msf = SCoveredMsf(self.hub(), {0})
        assert msf.forest_edges() == frozenset({0, 1, 2, 3})
        assert msf.delete(1) == MsfDelta(removed=(1,), added=(5,))
        assert msf.delete(4) == MsfDelta()
        assert msf.forest_edges() == kruskal(msf.graph)

    def test_meter_counts_scans(self):
        msf = SCoveredMsf(self.hub(), {0})
        msf.delete(1)
        assert msf.meter.units >= 1

    def test_rejects_uncovered_non_tree_edge(self):
        with pytest.raises(InputError):
            SCoveredMsf(self.hub(), set(), max_outside_degree=4)

    def test_rejects_high_degree_outside_s(self):
        with pytest.raises(InputError):
            SCoveredMsf(self.hub(), {1})

    @PROPERTY_SETTINGS
    @given(g=hub_graphs(), picks=st.lists(st.integers(0, 100), max_size=12))
    def test_matches_kruskal_under_deletions(self, g, picks):
        msf = SCoveredMsf(g, {0})
        for pick in picks:
            alive = sorted(msf.graph.edges())
            if not alive:
                break
            msf.delete(alive[pick % len(alive)])
            assert msf.forest_edges() == kruskal(msf.graph)


class TestKruskalReplay:
    def test_deltas(self):
        g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
        oracle = KruskalReplay(g)
        assert oracle.delete(0) == MsfDelta(removed=(0,), added=(2,))
        delta = oracle.insert_batch([(0, 1, 0, 7)])
        assert delta == MsfDelta(removed=(2,), added=(7,))
        assert g.num_edges() == 3

"""Tests for the graph substrate, cuts and degree reduction"""

import io
from fractions import Fraction

import pytest
from hypothesis import given

from dynmsf.exceptions import InputError, OracleScaleError
from dynmsf.graph_core import (
    Graph,
    WorkMeter,
    conductance,
    connected_components,
    degree_reduce,
    format_edge_list,
    is_connected,
    make_cut,
    max_degree,
    min_conductance_bruteforce,
    parse_edge_list,
    read_edge_list,
    volume,
    write_edge_list,
)
from dynmsf.msf_support import kruskal

from .strategies import PROPERTY_SETTINGS, weighted_graphs


def triangle_pair() -> Graph:
    """Two triangles joined by the bridge 2-3"""
    return Graph.from_edges(
        6,
        [(0, 1, 1), (1, 2, 2), (0, 2, 3), (3, 4, 4), (4, 5, 5), (3, 5, 6), (2, 3, 7)],
    )


class TestGraph:
    def test_edge_ids_are_sequential(self):
        g = Graph(3)
        assert g.add_edge(0, 1, 5) == 0
        assert g.add_edge(1, 2, 5) == 1
        assert g.add_edge(0, 1, 2) == 2
        assert g.num_edges() == 3
        assert g.degree(1) == 3

    def test_explicit_id_moves_counter(self):
        g = Graph(2)
        g.add_edge(0, 1, 1, eid=10)
        assert g.add_edge(0, 1, 1) == 11
        with pytest.raises(InputError):
            g.add_edge(0, 1, 1, eid=10)

    def test_rejects_self_loops_and_unknown_nodes(self):
        g = Graph(2)
        with pytest.raises(InputError):
            g.add_edge(1, 1, 1)
        with pytest.raises(InputError):
            g.add_edge(0, 2, 1)
        with pytest.raises(InputError):
            Graph(-1)

    def test_key_breaks_weight_ties_by_id(self):
        g = Graph.from_edges(2, [(0, 1, 4), (0, 1, 4)])
        assert g.key(0) < g.key(1)

    def test_delete_leaves_tombstone_until_compact(self):
        g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 2)])
        assert g.delete_edge(0) == (0, 1)
        assert not g.is_alive(0)
        assert g.has_edge(0)
        assert g.deleted_at(0) == 1
        assert list(g.incident(1)) == [(2, 1)]
        assert len(list(g.incident_all(1))) == 2
        with pytest.raises(InputError):
            g.delete_edge(0)
        assert g.compact() == 1
        assert not g.has_edge(0)

    def test_view_at_earlier_time(self):
        g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
        g.delete_edge(1)
        g.delete_edge(2)
        before = g.induced(g.nodes(), time=0)
        after_one = g.induced(g.nodes(), time=1)
        assert sorted(before.edges()) == [0, 1, 2]
        assert sorted(after_one.edges()) == [0, 2]
        assert sorted(g.induced(g.nodes()).edges()) == [0]

    def test_copy_keeps_ids_and_counter(self):
        g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
        g.delete_edge(1)
        clone = g.copy()
        assert sorted(clone.edges()) == [0, 2]
        assert clone.add_edge(0, 1, 9) == 3
        assert g.num_edges() == 2

    def test_subgraph_materialize(self):
        g = Graph.from_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 3)])
        local, order = g.induced([1, 2, 3]).materialize()
        assert order == [1, 2, 3]
        assert local.num_nodes() == 3
        assert local.num_edges() == 2


class TestCuts:
    def test_volume_and_conductance(self):
        g = triangle_pair()
        assert volume(g, [0, 1, 2]) == 7
        cut = make_cut(g, [0, 1, 2])
        assert cut.boundary == 1
        assert conductance(g, cut) == Fraction(1, 7)

    def test_conductance_rejects_improper_sets(self):
        g = triangle_pair()
        with pytest.raises(InputError):
            conductance(g, [])
        with pytest.raises(InputError):
            conductance(g, range(6))

    def test_bruteforce_finds_bridge_cut(self):
        cut, phi = min_conductance_bruteforce(triangle_pair())
        assert phi == Fraction(1, 7)
        assert cut.members == frozenset({0, 1, 2})

    def test_bruteforce_respects_cap(self):
        g = Graph.from_edges(5, [(i, i + 1, i) for i in range(4)])
        with pytest.raises(OracleScaleError):
            min_conductance_bruteforce(g, cap=4)

    @PROPERTY_SETTINGS
    @given(g=weighted_graphs(min_nodes=3, max_nodes=7, max_edges=12, connected=True))
    def test_bruteforce_is_a_lower_bound(self, g):
        cut, phi = min_conductance_bruteforce(g)
        assert conductance(g, cut) == phi
        for v in g.nodes():
            assert phi <= conductance(g, [v])

    def test_components(self):
        g = Graph.from_edges(5, [(0, 1, 1), (3, 4, 2)])
        assert connected_components(g) == [{0, 1}, {2}, {3, 4}]
        assert not is_connected(g)


class TestDegreeReduce:
    def test_no_split_is_plain_copy(self):
        g = triangle_pair()
        reduced, mapping = degree_reduce(g)
        assert not mapping.tiered
        assert reduced.num_nodes() == 6
        assert reduced.weight(0) == 1

    def test_star_is_split(self):
        g = Graph.from_edges(6, [(0, v, v) for v in range(1, 6)])
        reduced, mapping = degree_reduce(g)
        assert max_degree(reduced) <= 3
        assert len(mapping.gadget_edges) == 2
        assert reduced.weight(0) == (1, 1)
        assert mapping.real_weight(reduced.weight(0)) == 1
        assert {mapping.to_original(x) for x in mapping.images[0]} == {0}

    @PROPERTY_SETTINGS
    @given(g=weighted_graphs(min_nodes=2, max_nodes=8, max_edges=20))
    def test_reduction_preserves_msf(self, g):
        reduced, mapping = degree_reduce(g)
        assert max_degree(reduced) <= 3
        assert mapping.real_edges(kruskal(reduced)) == set(kruskal(g))


class TestEdgeList:
    def test_round_trip(self, tmp_path):
        g = triangle_pair()
        path = tmp_path / "g.graph"
        write_edge_list(g, path)
        loaded = read_edge_list(path)
        assert format_edge_list(loaded) == format_edge_list(g)

    @pytest.mark.parametrize(
        "text",
        ["", "3\n", "3 2\n0 1 1\n", "3 1\n0 1\n", "3 1\n0 1 x\n", "2 1\n0 0 1\n"],
    )
    def test_malformed_input(self, text):
        with pytest.raises(InputError):
            parse_edge_list(io.StringIO(text))

    def test_non_integer_weight_is_not_written(self):
        g = Graph.from_edges(2, [(0, 1, Fraction(1, 2))])
        with pytest.raises(InputError):
            format_edge_list(g)


def test_work_meter():
    meter = WorkMeter(limit=3)
    meter.charge(2)
    assert not meter.exceeded()
    meter.charge(2)
    assert meter.exceeded()
    assert meter.reset() == 4
    assert meter.units == 0

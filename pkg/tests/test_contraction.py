"""Tests for connecting paths, contraction and the few-non-tree-edges MSF"""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynmsf.contraction import (
    ContractorState,
    FewNonTreeMsf,
    GroupInfo,
    PhaseRebuildingMsf,
    TwoPhaseContractor,
    connecting_paths,
    contract,
    multigraph_factory,
    restricted_from_decremental,
)
from dynmsf.exceptions import CapacityExceeded, InputError, InvariantViolation, StateError
from dynmsf.graph_core import Graph
from dynmsf.harness import generate_graph
from dynmsf.msf_support import MsfDelta, kruskal

from .strategies import (
    PROPERTY_SETTINGS,
    SLOW_PROPERTY_SETTINGS,
    apply_updates,
    updates,
    weighted_graphs,
)


def spider() -> Graph:
    """Path 0-1-2-3-4 with a leg 2-5"""
    return Graph.from_edges(6, [(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 4, 4), (2, 5, 5)])


def path_with_chord() -> Graph:
    """Path 0..4 (edges 0-3) plus the chord 0-4 as edge 4"""
    return Graph.from_edges(5, [(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 4, 4), (0, 4, 10)])


class TestConnectingPaths:
    def test_non_terminal_leaves_are_stripped(self):
        system = connecting_paths(spider(), range(5), {0, 4})
        assert len(system) == 1
        assert system.paths[0].nodes == (0, 1, 2, 3, 4)
        assert system.paths[0].edges == (0, 1, 2, 3)

    def test_branch_node_splits_paths(self):
        system = connecting_paths(spider(), range(5), {0, 4, 5})
        assert sorted(p.nodes for p in system.paths) == [(0, 1, 2), (2, 3, 4), (2, 5)]
        assert set(system.edge_index()) == set(range(5))
        assert system.endpoints() == {0, 2, 4, 5}

    def test_paths_are_edge_disjoint(self):
        system = connecting_paths(spider(), range(5), {1, 3, 5})
        seen = set()
        for path in system.paths:
            assert not seen & set(path.edges)
            seen |= set(path.edges)


class TestContract:
    def test_path_becomes_one_super_edge(self):
        g = path_with_chord()
        pair = contract(g, kruskal(g))
        assert pair.nodes == [0, 4]
        assert pair.non_tree == frozenset({4})
        (sid,) = pair.forest
        assert sid > 4
        cover = pair.cover(2)
        assert cover is not None and cover.eid == sid
        assert cover.heaviest == 3
        assert pair.graph.weight(sid) == g.key(3)
        assert pair.graph.num_edges() <= 1 + 2 * 2

    def test_contracted_msf_tracks_host(self):
        g = path_with_chord()
        pair = contract(g, kruskal(g))
        (sid,) = pair.forest
        assert kruskal(pair.graph) == frozenset({sid})

    def test_rejects_inconsistent_input(self):
        g = path_with_chord()
        with pytest.raises(InputError):
            contract(g, range(4), non_tree=[3])
        with pytest.raises(InputError):
            contract(g, range(4), terminals={0})
        g.delete_edge(1)
        with pytest.raises(InputError):
            contract(g, range(4))

    @PROPERTY_SETTINGS
    @given(g=weighted_graphs(min_nodes=2, max_nodes=10, max_edges=18))
    def test_size_bound(self, g):
        forest = kruskal(g)
        pair = contract(g, forest)
        terminals = {v for e in pair.non_tree for v in g.endpoints(e)}
        assert pair.graph.num_edges() <= len(pair.non_tree) + 2 * len(terminals)
        for eid in forest:
            cover = pair.cover(eid)
            if cover is not None:
                assert eid in cover.path


class TestTwoPhaseContractor:
    def test_state_machine(self):
        g = path_with_chord()
        contractor = TwoPhaseContractor(g, range(4), label="0.1")
        assert contractor.state is ContractorState.READY
        with pytest.raises(StateError):
            contractor.cover_query(0)

        contractor.contract([4])
        assert contractor.phase == 2
        assert contractor.cover_query(0) is not None

        contractor.record("cut", 3)
        assert contractor.pending == 1
        with pytest.raises(StateError):
            contractor.contract([4])

        contractor.release()
        assert contractor.state is ContractorState.FREE
        assert 3 in contractor.forest()
        assert contractor.catch_up() == 1
        assert contractor.state is ContractorState.READY
        assert 3 not in contractor.forest()
        with pytest.raises(StateError):
            contractor.release()

    def test_ready_contractor_applies_immediately(self):
        contractor = TwoPhaseContractor(path_with_chord(), range(4))
        contractor.record("cut", 0)
        contractor.record("link", 4)
        assert contractor.pending == 0
        assert contractor.forest() == frozenset({1, 2, 3, 4})


class TestFewNonTreeMsf:
    def test_replacement_on_tree_deletion(self):
        g = path_with_chord()
        msf = FewNonTreeMsf(g, k=2, batch_size=2)
        assert msf.forest_edges() == frozenset({0, 1, 2, 3})
        assert msf.delete(1) == MsfDelta(removed=(1,), added=(4,))
        assert msf.non_tree_count() == 0
        assert msf.delete(2) == MsfDelta(removed=(2,))

    def test_insert_batch_swaps_heavier_tree_edge(self):
        msf = FewNonTreeMsf(path_with_chord(), k=4, batch_size=2)
        delta = msf.insert_batch([(1, 3, 0), (0, 2, 50)])
        assert delta == MsfDelta(removed=(2,), added=(5,))
        assert msf.non_tree_count() == 3
        assert sum(msf.level_sizes().values()) == 3
        assert msf.forest_edges() == kruskal(msf.graph)

    def test_capacity(self):
        with pytest.raises(CapacityExceeded):
            FewNonTreeMsf(path_with_chord(), k=1, batch_size=1).insert(0, 2, 50)
        with pytest.raises(CapacityExceeded):
            bundle = Graph.from_edges(2, [(0, 1, 1), (0, 1, 2), (0, 1, 3)])
            FewNonTreeMsf(bundle, k=1, batch_size=1)

    def test_batch_limit(self):
        msf = FewNonTreeMsf(path_with_chord(), k=8, batch_size=1)
        with pytest.raises(InputError):
            msf.insert_batch([(0, 2, 5), (1, 3, 6)])

    def test_info(self):
        info = FewNonTreeMsf(path_with_chord(), k=8, batch_size=3).get_info()
        assert info["k"] == 8
        assert info["levels"] == 3
        assert info["level_failure_p"] < info["failure_p"]

    @PROPERTY_SETTINGS
    @given(g=weighted_graphs(max_nodes=8, max_edges=16), ops=updates)
    def test_matches_kruskal_under_updates(self, g, ops):
        msf = FewNonTreeMsf(g, k=64, batch_size=4)
        assert msf.forest_edges() == kruskal(g)
        apply_updates(g, msf, ops)

    @SLOW_PROPERTY_SETTINGS
    @given(g=weighted_graphs(max_nodes=8, max_edges=16), ops=updates)
    def test_restricted_inner_algorithm(self, g, ops):
        factory = restricted_from_decremental(multigraph_factory, lambda m: 2)
        msf = FewNonTreeMsf(g, k=64, batch_size=4, factory=factory)
        apply_updates(g, msf, ops)


def chorded_path() -> Graph:
    """Path 0..6 (edges 0-5) with the chords 0-2, 3-5 and 0-5 as edges 6, 7, 8"""
    path = [(i, i + 1, i + 1) for i in range(6)]
    return Graph.from_edges(7, path + [(0, 2, 50), (3, 5, 60), (0, 5, 100)])


def sparse_graph(n: int, extra: int, rng: random.Random) -> Graph:
    """Random spanning tree plus `extra` random edges, weights a shuffle of 1..m"""
    pairs = [(rng.randrange(v), v) for v in range(1, n)]
    while len(pairs) < n - 1 + extra:
        u, v = rng.sample(range(n), 2)
        pairs.append((u, v))
    weights = list(range(1, len(pairs) + 1))
    rng.shuffle(weights)
    return Graph.from_edges(n, [(u, v, w) for (u, v), w in zip(pairs, weights)])


def run_stream(g: Graph, msf: FewNonTreeMsf, steps: int, rng: random.Random) -> None:
    """Mixed batches and deletions on g and msf, checking Kruskal and level caps every step"""
    n = g.num_nodes()
    next_weight = max(g.weight(e) for e in g.edges()) + 1
    caps = msf.level_caps()
    for _ in range(steps):
        room = msf.k - msf.non_tree_count()
        alive = sorted(g.edges())
        if room > 0 and (not alive or rng.random() < 0.3):
            batch = []
            for _ in range(rng.randint(1, min(msf.batch_size, room))):
                u, v = rng.sample(range(n), 2)
                eid = g.add_edge(u, v, next_weight)
                batch.append((u, v, next_weight, eid))
                next_weight += 1
            msf.insert_batch(batch)
        else:
            eid = rng.choice(alive)
            g.delete_edge(eid)
            msf.delete(eid)
        assert msf.forest_edges() == kruskal(g)
        for (level, _), size in msf.level_sizes().items():
            assert size <= caps[level]


class TestGroupTransitions:
    def test_initial_group(self):
        msf = FewNonTreeMsf(chorded_path(), k=3, batch_size=1)
        assert msf.groups() == [GroupInfo(level=2, size=3, super_edges=3, built_at=0)]
        assert msf.stats.builds == 1

    def test_deletions_update_groups_in_place(self, configure):
        configure(assertions={"level": 2})
        g = chorded_path()
        msf = FewNonTreeMsf(g, k=3, batch_size=1)

        # tree edge on no connecting path
        assert msf.delete(5) == MsfDelta(removed=(5,))
        assert msf.groups() == [GroupInfo(level=2, size=3, super_edges=3, built_at=0)]
        assert msf.stats.forwarded == 0

        # tree edge on the path 0-1-2: both chords at node 0 leave the group
        assert msf.delete(1) == MsfDelta(removed=(1,), added=(6,))
        assert msf.stats.ejected == 2
        assert msf.groups() == [
            GroupInfo(level=0, size=1, super_edges=1, built_at=1),
            GroupInfo(level=2, size=1, super_edges=2, built_at=0),
        ]
        assert msf.stats.builds == 2

        # non-tree edge: forwarded to its group, which empties and goes away
        assert msf.delete(8) == MsfDelta()
        assert msf.groups() == [GroupInfo(level=2, size=1, super_edges=2, built_at=0)]

        assert msf.delete(3) == MsfDelta(removed=(3,), added=(7,))
        assert msf.groups() == []
        assert msf.stats.builds == 2
        g.delete_edge(5)
        g.delete_edge(1)
        g.delete_edge(8)
        g.delete_edge(3)
        assert msf.forest_edges() == kruskal(g)

    def test_swapped_tree_edge_detaches_groups(self):
        msf = FewNonTreeMsf(path_with_chord(), k=4, batch_size=1)
        assert msf.insert(1, 3, 0) == MsfDelta(removed=(2,), added=(5,))
        assert msf.stats.ejected == 1
        assert msf.groups() == [GroupInfo(level=0, size=2, super_edges=4, built_at=0)]

    def test_ready_contractor_is_required(self):
        msf = FewNonTreeMsf(path_with_chord(), k=2, batch_size=1)
        for contractor in msf._pool[0]:
            contractor.state = ContractorState.FREE
        with pytest.raises(InvariantViolation):
            msf.insert(0, 2, 50)

    def test_tree_deletions_reuse_group_engines(self):
        g = generate_graph("random-3-regular", 128, 0)
        msf = FewNonTreeMsf(g, k=g.num_edges(), batch_size=16)
        rng = random.Random(0)
        replaced = 0
        for step in range(1, 31):
            eid = rng.choice(sorted(msf.forest_edges()))
            g.delete_edge(eid)
            replaced += bool(msf.delete(eid).added)
            assert msf.forest_edges() == kruskal(g)
            assert msf.stats.builds - msf.stats.merges <= 1 + step
        assert replaced > 0
        assert msf.stats.forwarded >= 2 * replaced
        caps = msf.level_caps()
        for (level, _), size in msf.level_sizes().items():
            assert size <= caps[level]


@pytest.mark.slow
class TestStreams:
    @pytest.mark.parametrize("seed", range(5))
    def test_capped_levels_on_sparse_graphs(self, seed):
        rng = random.Random(seed)
        g = sparse_graph(128, 24, rng)
        msf = FewNonTreeMsf(g, k=32, batch_size=16)
        run_stream(g, msf, 200, rng)

    @pytest.mark.parametrize("seed", range(5))
    def test_group_forests_stay_contracted(self, configure, seed):
        configure(assertions={"level": 2})
        rng = random.Random(100 + seed)
        g = sparse_graph(40, 16, rng)
        msf = FewNonTreeMsf(g, k=32, batch_size=2)
        run_stream(g, msf, 200, rng)
        assert msf.stats.forwarded > 0
        assert msf.contractor_states()["ready"] > 0


class TestPhaseRebuildingMsf:
    @PROPERTY_SETTINGS
    @given(
        g=weighted_graphs(min_nodes=2, max_nodes=8, max_edges=16),
        bound=st.integers(0, 6),
        seed=st.randoms(use_true_random=False),
    )
    def test_forest_stays_exact(self, g, bound, seed):
        msf = PhaseRebuildingMsf(g, multigraph_factory, bound)
        order = sorted(g.edges())
        seed.shuffle(order)
        for eid in order:
            msf.delete(eid)
            assert msf.forest_edges() == kruskal(g)
        assert msf.forest_edges() == frozenset()

    def test_rebuilds_before_the_bound(self):
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        g = Graph.from_edges(4, [(i, j, 4 * i + j) for i, j in pairs])
        msf = PhaseRebuildingMsf(g, multigraph_factory, 2)
        for eid in sorted(g.edges()):
            msf.delete(eid)
        assert msf.rebuilds >= 2
        assert msf.meter.units > 0

    @pytest.mark.parametrize("bound", [0, 2, 5, 12])
    def test_each_step_stays_within_its_bound(self, bound):
        g = generate_graph("random-3-regular", 32, 1)
        msf = PhaseRebuildingMsf(g, multigraph_factory, bound)
        order = sorted(g.edges())
        random.Random(bound).shuffle(order)
        staged = False
        for eid in order:
            before = msf.meter.units
            msf.delete(eid)
            assert msf.meter.units - before <= msf.step_bound
            assert msf.forest_edges() == kruskal(g)
            staged = staged or msf.staging
        assert staged == (bound >= 2)

    def test_dead_edge(self):
        g = path_with_chord()
        msf = restricted_from_decremental(multigraph_factory)(g)
        msf.delete(0)
        with pytest.raises(InputError):
            msf.delete(0)

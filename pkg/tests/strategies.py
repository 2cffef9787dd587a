"""Hypothesis strategies shared by the test modules"""

from typing import List, Tuple

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dynmsf.graph_core import Graph
from dynmsf.msf_support import kruskal

PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)

SLOW_PROPERTY_SETTINGS = settings(
    max_examples=15,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)


def _bounded(pairs: List[Tuple[int, int]], n: int, limit: int) -> List[Tuple[int, int]]:
    degree = [0] * n
    kept = []
    for u, v in pairs:
        if degree[u] < limit and degree[v] < limit:
            kept.append((u, v))
            degree[u] += 1
            degree[v] += 1
    return kept


@st.composite
def weighted_graphs(
    draw,
    min_nodes: int = 2,
    max_nodes: int = 8,
    max_edges: int = 16,
    connected: bool = False,
    max_degree: int = 0,
) -> Graph:
    """
    Multigraphs with weights forming a permutation of 1..m

    With connected=True a spanning path (max_degree set) or a random
    spanning tree comes first. max_degree > 0 drops extra edges that would
    exceed the bound.
    """
    n = draw(st.integers(min_nodes, max_nodes))
    pairs: List[Tuple[int, int]] = []
    if connected:
        for v in range(1, n):
            parent = v - 1 if max_degree else draw(st.integers(0, v - 1))
            pairs.append((parent, v))
    node = st.integers(0, n - 1)
    extra = draw(
        st.lists(
            st.tuples(node, node).filter(lambda p: p[0] != p[1]),
            max_size=max(0, max_edges - len(pairs)),
        )
    )
    pairs.extend(extra)
    if max_degree:
        pairs = _bounded(pairs, n, max_degree)
    weights = draw(st.permutations(list(range(1, len(pairs) + 1))))
    return Graph.from_edges(n, [(u, v, w) for (u, v), w in zip(pairs, weights)])


# an update is (is_insert, a, b); tests interpret a and b against the current graph
_index = st.integers(0, 1000)
updates = st.lists(st.tuples(st.booleans(), _index, _index), max_size=25)


def apply_updates(g: Graph, engine, ops, insert: bool = True) -> None:
    """Replay encoded updates on g and the engine, comparing with Kruskal each step"""
    n = g.num_nodes()
    next_weight = max((g.weight(e) for e in g.edges()), default=0) + 1
    for is_insert, a, b in ops:
        alive = sorted(g.edges())
        if insert and (is_insert or not alive):
            u, v = a % n, b % n
            if u == v:
                continue
            eid = g.add_edge(u, v, next_weight)
            next_weight += 1
            engine.insert(u, v, g.weight(eid), eid)
        elif alive:
            eid = alive[a % len(alive)]
            g.delete_edge(eid)
            engine.delete(eid)
        assert engine.forest_edges() == kruskal(g)

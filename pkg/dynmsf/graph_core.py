#!/usr/bin/env python3
"""
dynmsf - Graph Core
===================

Copyright (c) 2026 dynmsf developers.

Multigraph representation shared by every algorithm in the package, together
with exact cut metrics, the degree-reduction gadget and the exponential
brute-force conductance oracle used throughout the tests.

Features:
- Undirected multigraph with stable integer edge ids and tombstoned deletion
- Exact rational conductance and expansion (fractions.Fraction)
- Time-aware induced views for algorithms that work on past snapshots
- Vertex-splitting reduction to maximum degree 3
- Edge-list text format (`n m` header, `u v w` lines)

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Set,
    TextIO,
    Tuple,
    Union,
)

from typing_extensions import Protocol

from .config import get_settings
from .exceptions import InputError, OracleScaleError
from .logging_setup import get_logger

logger = get_logger(__name__)

Weight = Any
EdgeKey = Tuple[Any, int]


class LocalGraph(Protocol):
    """Read access every algorithm is allowed to rely on"""

    def has_node(self, v: int) -> bool: ...

    def nodes(self) -> Iterable[int]: ...

    def num_nodes(self) -> int: ...

    def incident(self, v: int) -> Iterator[Tuple[int, int]]: ...

    def degree(self, v: int) -> int: ...

    def endpoints(self, eid: int) -> Tuple[int, int]: ...

    def weight(self, eid: int) -> Weight: ...


class Graph:
    """
    Undirected multigraph over dense node ids

    Edges carry an id, two distinct endpoints and a weight. Weights are
    compared through key(eid) = (weight, eid), which makes every pair of
    edges comparable even if raw weights tie. Deleted edges stay in the
    adjacency maps as tombstones until compact() is called, so that views
    of earlier points in time remain answerable.
    """

    def __init__(self, n: int = 0):
        """
        Initialize an edgeless graph

        Args:
            n: Number of nodes, ids 0..n-1
        """
        if n < 0:
            raise InputError("node count must be non-negative")
        self._adj: List[Dict[int, int]] = [{} for _ in range(n)]
        self._deg: List[int] = [0] * n
        self._ends: Dict[int, Tuple[int, int]] = {}
        self._weight: Dict[int, Weight] = {}
        self._dead: Dict[int, int] = {}
        self._next_eid = 0
        self._alive_count = 0
        self.clock = 0

    # -- nodes -----------------------------------------------------------

    def num_nodes(self) -> int:
        return len(self._adj)

    def nodes(self) -> range:
        return range(len(self._adj))

    def has_node(self, v: int) -> bool:
        return 0 <= v < len(self._adj)

    def add_node(self) -> int:
        self._adj.append({})
        self._deg.append(0)
        return len(self._adj) - 1

    def _check_node(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < len(self._adj)):
            raise InputError(f"unknown node {v!r}")

    # -- edges -----------------------------------------------------------

    def add_edge(self, u: int, v: int, w: Weight, eid: Optional[int] = None) -> int:
        """
        Insert an edge and return its id

        Args:
            u: First endpoint
            v: Second endpoint, distinct from u
            w: Weight, comparable with every other weight in the graph
            eid: Explicit id; defaults to one past the largest id seen
        """
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise InputError(f"self-loop at node {u}")
        if eid is None:
            eid = self._next_eid
        elif eid in self._ends:
            raise InputError(f"edge id {eid} already used")
        self._next_eid = max(self._next_eid, eid + 1)
        self._ends[eid] = (u, v)
        self._weight[eid] = w
        self._adj[u][eid] = v
        self._adj[v][eid] = u
        self._deg[u] += 1
        self._deg[v] += 1
        self._alive_count += 1
        return eid

    def delete_edge(self, eid: int) -> Tuple[int, int]:
        """Tombstone an alive edge and return its endpoints"""
        if eid not in self._ends:
            raise InputError(f"unknown edge {eid}")
        if eid in self._dead:
            raise InputError(f"edge {eid} already deleted")
        self.clock += 1
        self._dead[eid] = self.clock
        u, v = self._ends[eid]
        self._deg[u] -= 1
        self._deg[v] -= 1
        self._alive_count -= 1
        return u, v

    def compact(self) -> int:
        """Drop tombstoned edges; returns how many were removed"""
        removed = 0
        for eid in list(self._dead):
            u, v = self._ends.pop(eid)
            self._weight.pop(eid)
            self._adj[u].pop(eid, None)
            self._adj[v].pop(eid, None)
            removed += 1
        self._dead.clear()
        return removed

    def has_edge(self, eid: int) -> bool:
        return eid in self._ends

    def is_alive(self, eid: int) -> bool:
        return eid in self._ends and eid not in self._dead

    def deleted_at(self, eid: int) -> Optional[int]:
        return self._dead.get(eid)

    def alive_at(self, eid: int, time: int) -> bool:
        """Whether the edge existed after `time` deletions had been applied"""
        stamp = self._dead.get(eid)
        return stamp is None or stamp > time

    def endpoints(self, eid: int) -> Tuple[int, int]:
        try:
            return self._ends[eid]
        except KeyError:
            raise InputError(f"unknown edge {eid}")

    def other(self, eid: int, v: int) -> int:
        a, b = self.endpoints(eid)
        return b if v == a else a

    def weight(self, eid: int) -> Weight:
        try:
            return self._weight[eid]
        except KeyError:
            raise InputError(f"unknown edge {eid}")

    def key(self, eid: int) -> EdgeKey:
        return (self.weight(eid), eid)

    def degree(self, v: int) -> int:
        self._check_node(v)
        return self._deg[v]

    def incident(self, v: int) -> Iterator[Tuple[int, int]]:
        """Alive incident edges as (neighbor, edge id)"""
        self._check_node(v)
        dead = self._dead
        for eid, u in self._adj[v].items():
            if eid not in dead:
                yield u, eid

    def incident_all(self, v: int) -> Iterator[Tuple[int, int]]:
        """Incident edges including tombstones"""
        self._check_node(v)
        for eid, u in self._adj[v].items():
            yield u, eid

    def edges(self) -> Iterator[int]:
        dead = self._dead
        for eid in self._ends:
            if eid not in dead:
                yield eid

    def num_edges(self) -> int:
        return self._alive_count

    def max_edge_id(self) -> int:
        return self._next_eid - 1

    def total_volume(self) -> int:
        return 2 * self._alive_count

    def volume(self, nodes: Iterable[int]) -> int:
        return volume(self, nodes)

    def copy(self) -> "Graph":
        """Copy of the alive part; edge ids and weights are preserved"""
        clone = Graph(self.num_nodes())
        for eid in sorted(self.edges()):
            u, v = self._ends[eid]
            clone.add_edge(u, v, self._weight[eid], eid)
        clone._next_eid = self._next_eid
        return clone

    def induced(self, nodes: Iterable[int], time: Optional[int] = None) -> "Subgraph":
        return Subgraph(self, nodes, time)

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[Tuple[int, int, Weight]]
    ) -> "Graph":
        g = cls(n)
        for u, v, w in edges:
            g.add_edge(u, v, w)
        return g

    def __repr__(self) -> str:
        return f"Graph(n={self.num_nodes()}, m={self.num_edges()})"


class Subgraph:
    """
    Induced view G[U] of a Graph, optionally as of an earlier time

    With `time` set, an edge is visible if it was still alive after the
    host graph had performed `time` deletions.
    """

    def __init__(self, host: Graph, nodes: Iterable[int], time: Optional[int] = None):
        self.host = host
        self.members: Set[int] = set(nodes)
        self.time = time
        for v in self.members:
            host._check_node(v)

    def is_visible(self, eid: int) -> bool:
        if self.time is None:
            return self.host.is_alive(eid)
        return self.host.alive_at(eid, self.time)

    def has_node(self, v: int) -> bool:
        return v in self.members

    def nodes(self) -> Iterable[int]:
        return sorted(self.members)

    def num_nodes(self) -> int:
        return len(self.members)

    def incident(self, v: int) -> Iterator[Tuple[int, int]]:
        if v not in self.members:
            raise InputError(f"node {v} not in view")
        members = self.members
        for u, eid in self.host.incident_all(v):
            if u in members and self.is_visible(eid):
                yield u, eid

    def degree(self, v: int) -> int:
        return sum(1 for _ in self.incident(v))

    def endpoints(self, eid: int) -> Tuple[int, int]:
        return self.host.endpoints(eid)

    def weight(self, eid: int) -> Weight:
        return self.host.weight(eid)

    def edges(self) -> Iterator[int]:
        seen: Set[int] = set()
        for v in sorted(self.members):
            for _, eid in self.incident(v):
                if eid not in seen:
                    seen.add(eid)
                    yield eid

    def num_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def total_volume(self) -> int:
        return sum(self.degree(v) for v in self.members)

    def materialize(self) -> Tuple[Graph, List[int]]:
        """Standalone Graph over 0..k-1 plus the list mapping local to host ids"""
        order = sorted(self.members)
        index = {v: i for i, v in enumerate(order)}
        g = Graph(len(order))
        for eid in sorted(self.edges()):
            u, v = self.host.endpoints(eid)
            g.add_edge(index[u], index[v], self.host.weight(eid), eid)
        return g, order


GraphLike = Union[Graph, Subgraph]


@dataclass(frozen=True)
class Cut:
    """A node set with its cached volume and boundary size"""

    members: FrozenSet[int]
    volume: int
    boundary: int

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: object) -> bool:
        return v in self.members


def total_volume(g: Any) -> int:
    if hasattr(g, "total_volume"):
        return int(g.total_volume())
    return sum(g.degree(v) for v in g.nodes())


def _members(s: Union[Cut, Iterable[int]]) -> FrozenSet[int]:
    return s.members if isinstance(s, Cut) else frozenset(s)


def volume(g: Any, s: Iterable[int]) -> int:
    """Sum of alive degrees over s, parallel edges counted separately"""
    total = 0
    for v in s:
        if not g.has_node(v):
            raise InputError(f"unknown node {v!r}")
        total += g.degree(v)
    return total


def boundary(g: Any, s: Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in s"""
    members = frozenset(s)
    count = 0
    for v in members:
        if not g.has_node(v):
            raise InputError(f"unknown node {v!r}")
        for u, _ in g.incident(v):
            if u not in members:
                count += 1
    return count


def make_cut(g: Any, s: Iterable[int]) -> Cut:
    members = frozenset(s)
    return Cut(members, volume(g, members), boundary(g, members))


def _proper(g: Any, members: FrozenSet[int]) -> int:
    n = g.num_nodes()
    if not members or len(members) >= n:
        raise InputError("cut must be a non-empty proper subset of the nodes")
    return n


def conductance(g: Any, s: Union[Cut, Iterable[int]]) -> Fraction:
    """Exact δ(S) / min(vol(S), vol(V-S))"""
    members = _members(s)
    _proper(g, members)
    cut = s if isinstance(s, Cut) else make_cut(g, members)
    other = total_volume(g) - cut.volume
    denominator = min(cut.volume, other)
    if denominator <= 0:
        raise InputError("conductance undefined: a side has zero volume")
    return Fraction(cut.boundary, denominator)


def expansion(g: Any, s: Union[Cut, Iterable[int]]) -> Fraction:
    """Exact δ(S) / min(|S|, |V-S|)"""
    members = _members(s)
    n = _proper(g, members)
    delta = s.boundary if isinstance(s, Cut) else boundary(g, members)
    return Fraction(delta, min(len(members), n - len(members)))


def min_conductance_bruteforce(
    g: Any, cap: Optional[int] = None
) -> Tuple[Cut, Fraction]:
    """
    Exact minimum-conductance cut by enumerating all bipartitions

    Bipartitions are walked in Gray-code order, so each step moves a single
    node and updates volume and boundary incrementally. The reported side is
    the one with smaller volume (lexicographically smaller on ties), and
    among optimal cuts the lexicographically smallest reported side wins.

    Args:
        g: Graph or view with at least two nodes
        cap: Largest node count accepted; defaults to oracle.bruteforce_cap
    """
    limit = get_settings().oracle.bruteforce_cap if cap is None else cap
    order = sorted(g.nodes())
    n = len(order)
    if n < 2:
        raise InputError("need at least two nodes to form a cut")
    if n > limit:
        raise OracleScaleError("min_conductance_bruteforce", n, limit)

    index = {v: i for i, v in enumerate(order)}
    neighbors: List[List[int]] = [
        [index[u] for u, _ in g.incident(v)] for v in order
    ]
    degrees = [len(nb) for nb in neighbors]
    total = sum(degrees)

    in_s = [False] * n
    vol_s = 0
    delta = 0
    best: Optional[Tuple[int, int]] = None
    best_side: Optional[Tuple[int, ...]] = None

    for step in range(1, 1 << (n - 1)):
        flip = 1 + ((step & -step).bit_length() - 1)
        entering = not in_s[flip]
        for j in neighbors[flip]:
            if in_s[j]:
                delta += -1 if entering else 1
            else:
                delta += 1 if entering else -1
        in_s[flip] = entering
        vol_s += degrees[flip] if entering else -degrees[flip]

        den = min(vol_s, total - vol_s)
        if den <= 0:
            continue
        if best is not None:
            lhs = delta * best[1]
            rhs = best[0] * den
            if lhs > rhs:
                continue
        inside = tuple(order[i] for i in range(n) if in_s[i])
        outside = tuple(order[i] for i in range(n) if not in_s[i])
        if vol_s < total - vol_s:
            side = inside
        elif vol_s > total - vol_s:
            side = outside
        else:
            side = min(inside, outside)
        if best is None or delta * best[1] < best[0] * den or side < best_side:
            best = (delta, den)
            best_side = side

    if best is None or best_side is None:
        raise InputError("no cut with positive volume on both sides")
    cut = make_cut(g, best_side)
    return cut, Fraction(best[0], best[1])


def connected_components(g: Any) -> List[Set[int]]:
    """Components over alive edges, in order of their smallest node"""
    seen: Set[int] = set()
    components: List[Set[int]] = []
    for start in sorted(g.nodes()):
        if start in seen:
            continue
        component = {start}
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u, _ in g.incident(v):
                if u not in seen:
                    seen.add(u)
                    component.add(u)
                    queue.append(u)
        components.append(component)
    return components


def is_connected(g: Any) -> bool:
    return g.num_nodes() <= 1 or len(connected_components(g)) == 1


def max_degree(g: Any) -> int:
    return max((g.degree(v) for v in g.nodes()), default=0)


# -- degree reduction ----------------------------------------------------


@dataclass
class DegreeMapping:
    """Translation between an input graph and its max-degree-3 reduction"""

    original_of: List[int] = field(default_factory=list)
    images: Dict[int, List[int]] = field(default_factory=dict)
    gadget_edges: Set[int] = field(default_factory=set)
    tiered: bool = False

    def to_original(self, node: int) -> int:
        return self.original_of[node]

    def representative(self, node: int) -> int:
        return self.images[node][0]

    def is_gadget(self, eid: int) -> bool:
        return eid in self.gadget_edges

    def real_edges(self, eids: Iterable[int]) -> Set[int]:
        return {e for e in eids if e not in self.gadget_edges}

    def real_weight(self, w: Weight) -> Weight:
        """Undo the (tier, weight) wrapping applied to real edges"""
        return w[1] if self.tiered else w


def degree_reduce(g: Graph) -> Tuple[Graph, DegreeMapping]:
    """
    Split every node of degree d > 3 into a path of d - 2 gadget nodes

    Real edges keep their ids. When any split happens, weights become
    tuples: (1, w) for real edges and (0, j) for gadget edges, so every
    gadget edge is lighter than every real edge and gadget edges always sit
    in the minimum spanning forest. Without splits the result is a plain
    copy and the mapping is the identity.
    """
    n = g.num_nodes()
    needs_split = any(g.degree(v) > 3 for v in range(n))
    mapping = DegreeMapping(tiered=needs_split)
    if not needs_split:
        mapping.original_of = list(range(n))
        mapping.images = {v: [v] for v in range(n)}
        return g.copy(), mapping

    reduced = Graph(0)
    slots: Dict[Tuple[int, int], int] = {}
    next_gadget = g.max_edge_id() + 1
    gadget_rank = 0

    for v in range(n):
        incident = sorted(eid for _, eid in g.incident(v))
        d = len(incident)
        if d <= 3:
            node = reduced.add_node()
            mapping.original_of.append(v)
            mapping.images[v] = [node]
            for eid in incident:
                slots[(v, eid)] = node
            continue
        path = []
        for _ in range(d - 2):
            path.append(reduced.add_node())
            mapping.original_of.append(v)
        mapping.images[v] = path
        for a, b in zip(path, path[1:]):
            reduced.add_edge(a, b, (0, gadget_rank), next_gadget)
            mapping.gadget_edges.add(next_gadget)
            next_gadget += 1
            gadget_rank += 1
        # ends take two real edges, interior nodes one
        capacity = [2] + [1] * (d - 4) + [2]
        position = 0
        for eid in incident:
            while capacity[position] == 0:
                position += 1
            slots[(v, eid)] = path[position]
            capacity[position] -= 1

    for eid in sorted(g.edges()):
        u, v = g.endpoints(eid)
        reduced.add_edge(slots[(u, eid)], slots[(v, eid)], (1, g.weight(eid)), eid)

    logger.debug(
        "degree_reduced",
        nodes_in=n,
        nodes_out=reduced.num_nodes(),
        gadget_edges=len(mapping.gadget_edges),
    )
    return reduced, mapping


# -- edge-list format ----------------------------------------------------


def parse_edge_list(stream: TextIO) -> Graph:
    """Parse `n m` followed by m lines `u v w` of integers"""
    lines = [line.split() for line in stream if line.strip() and not line.startswith("#")]
    if not lines:
        raise InputError("empty edge list")
    try:
        header = [int(tok) for tok in lines[0]]
        if len(header) != 2:
            raise InputError("header must be `n m`")
        n, m = header
        if len(lines) - 1 != m:
            raise InputError(f"header announces {m} edges, found {len(lines) - 1}")
        g = Graph(n)
        for tokens in lines[1:]:
            if len(tokens) != 3:
                raise InputError(f"malformed edge line: {' '.join(tokens)}")
            u, v, w = (int(tok) for tok in tokens)
            g.add_edge(u, v, w)
    except ValueError as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"non-integer token in edge list: {e}")
    return g


def read_edge_list(path: Union[str, Path]) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh)


def format_edge_list(g: Graph) -> str:
    """Alive edges in id order; weights must be integers"""
    rows = [f"{g.num_nodes()} {g.num_edges()}"]
    for eid in sorted(g.edges()):
        u, v = g.endpoints(eid)
        w = g.weight(eid)
        if not isinstance(w, int):
            raise InputError(f"edge {eid} has non-integer weight {w!r}")
        rows.append(f"{u} {v} {w}")
    return "\n".join(rows) + "\n"


def write_edge_list(g: Graph, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


class WorkMeter:
    """Deterministic work-unit counter used instead of wall-clock time"""

    def __init__(self, limit: Optional[int] = None):
        self.units = 0
        self.limit = limit

    def charge(self, amount: int = 1) -> None:
        self.units += amount

    def exceeded(self) -> bool:
        return self.limit is not None and self.units > self.limit

    def reset(self) -> int:
        spent, self.units = self.units, 0
        return spent

    def __repr__(self) -> str:
        return f"WorkMeter(units={self.units}, limit={self.limit})"

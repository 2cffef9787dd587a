#!/usr/bin/env python3
"""
dynmsf - Tree Contraction and the Few Non-Tree Edge Reduction
=============================================================

Copyright (c) 2026 dynmsf developers.

Compresses a spanning forest down to the part that matters for a small set
of non-tree edges, and builds a fully dynamic MSF for graphs with few
non-tree edges out of any decremental MSF algorithm.

Features:
- Connecting paths: the unique minimal path system spanning a terminal set
- Contracted graphs whose super edges carry the heaviest covered key
- Two-phase contractors (forest tracking, then frozen cover queries)
- FewNonTreeMsf: levelled groups of non-tree edges, each with its own
  contracted graph and decremental MSF instance, updated in place
- Phase rebuilding that turns a bounded-sequence decremental algorithm
  into an unbounded one, staging the shadow copy a slice per step

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import (
    Any,
    Callable,
    Deque,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from typing_extensions import Protocol

from .config import assert_level, get_settings
from .exceptions import CapacityExceeded, InputError, InvariantViolation, StateError
from .graph_core import Graph, WorkMeter
from .logging_setup import get_logger
from .msf_support import DynamicForest, MsfDelta, MultigraphMsf, forest_delta, kruskal

logger = get_logger(__name__)


class DecrementalMsf(Protocol):
    """Anything that maintains an MSF under edge deletions"""

    def delete(self, eid: int) -> MsfDelta: ...

    def forest_edges(self) -> FrozenSet[int]: ...


DecrementalFactory = Callable[[Graph], DecrementalMsf]


def multigraph_factory(graph: Graph) -> DecrementalMsf:
    """Default decremental algorithm: the small multigraph structure"""
    return MultigraphMsf(graph, copy=False)


# -- connecting paths ------------------------------------------------------


@dataclass(frozen=True)
class ConnectingPath:
    nodes: Tuple[int, ...]
    edges: Tuple[int, ...]

    @property
    def ends(self) -> Tuple[int, int]:
        return self.nodes[0], self.nodes[-1]


@dataclass(frozen=True)
class ConnectingPaths:
    """Edge-disjoint forest paths whose union is the Steiner forest of the terminals"""

    paths: Tuple[ConnectingPath, ...]
    terminals: FrozenSet[int]

    def __len__(self) -> int:
        return len(self.paths)

    def endpoints(self) -> Set[int]:
        ends: Set[int] = set()
        for path in self.paths:
            ends.update(path.ends)
        return ends

    def edge_index(self) -> Dict[int, int]:
        """Tree edge id -> position of the path containing it"""
        return {eid: i for i, path in enumerate(self.paths) for eid in path.edges}


def _forest_adjacency(g: Any, forest: Iterable[int]) -> Dict[int, Dict[int, int]]:
    adj: Dict[int, Dict[int, int]] = {}
    for eid in forest:
        u, v = g.endpoints(eid)
        adj.setdefault(u, {})[eid] = v
        adj.setdefault(v, {})[eid] = u
    return adj


def connecting_paths(g: Any, forest: Iterable[int], terminals: Iterable[int]) -> ConnectingPaths:
    """
    Minimal path system of a forest with respect to a terminal set

    Non-terminal leaves are stripped until every leaf is a terminal; what is
    left is the Steiner forest. Its branch nodes are the terminals plus the
    nodes of Steiner degree three or more, and the paths are the maximal
    chains between branch nodes.
    """
    adj = _forest_adjacency(g, forest)
    terms = frozenset(terminals)
    degree = {v: len(nbrs) for v, nbrs in adj.items()}
    removed: Set[int] = set()

    stack = [v for v in adj if degree[v] <= 1 and v not in terms]
    while stack:
        v = stack.pop()
        if v in removed:
            continue
        removed.add(v)
        for u in adj[v].values():
            if u in removed:
                continue
            degree[u] -= 1
            if degree[u] <= 1 and u not in terms:
                stack.append(u)

    steiner: Dict[int, Dict[int, int]] = {
        v: {eid: u for eid, u in nbrs.items() if u not in removed}
        for v, nbrs in adj.items()
        if v not in removed
    }
    branch = {v for v, nbrs in steiner.items() if v in terms or len(nbrs) >= 3}

    used: Set[int] = set()
    paths: List[ConnectingPath] = []
    for start in sorted(branch):
        for first in sorted(steiner[start]):
            if first in used:
                continue
            nodes = [start]
            edges = [first]
            used.add(first)
            current = steiner[start][first]
            last = first
            while current not in branch:
                step = next(eid for eid in steiner[current] if eid != last)
                nodes.append(current)
                edges.append(step)
                used.add(step)
                last = step
                current = steiner[current][step]
            nodes.append(current)
            paths.append(ConnectingPath(tuple(nodes), tuple(edges)))

    return ConnectingPaths(tuple(paths), terms)


# -- contracted graphs ---------------------------------------------------------


@dataclass(frozen=True)
class SuperEdge:
    eid: int
    ends: Tuple[int, int]
    path: Tuple[int, ...]
    heaviest: int


@dataclass
class ContractedPair:
    """
    Contracted graph G' together with its forest F' and the back-pointers

    G' has dense local node ids; `nodes[i]` is the original node behind
    local node i. Non-tree edges keep their original ids, super edges get
    ids above every id of the host graph. Edge weights in G' are the
    original keys, so comparisons agree with the host graph.
    """

    graph: Graph
    nodes: List[int]
    index: Dict[int, int]
    super_edges: Dict[int, SuperEdge]
    non_tree: FrozenSet[int]
    covered_by: Dict[int, int] = field(default_factory=dict)

    @property
    def forest(self) -> FrozenSet[int]:
        return frozenset(self.super_edges)

    def cover(self, eid: int) -> Optional[SuperEdge]:
        sid = self.covered_by.get(eid)
        return None if sid is None else self.super_edges[sid]

    def is_super(self, eid: int) -> bool:
        return eid in self.super_edges

    def split(self, eid: int) -> Optional[SuperEdge]:
        """Drop the super edge whose path holds tree edge eid; None if no path does"""
        sid = self.covered_by.get(eid)
        if sid is None:
            return None
        sup = self.super_edges.pop(sid)
        for tree_eid in sup.path:
            self.covered_by.pop(tree_eid, None)
        return sup

    def discard(self, eid: int) -> None:
        self.non_tree = self.non_tree - {eid}


def contract(
    g: Any,
    forest: Iterable[int],
    terminals: Optional[Iterable[int]] = None,
    non_tree: Optional[Iterable[int]] = None,
) -> ContractedPair:
    """
    Contract a graph onto the connecting paths of its non-tree endpoints

    Args:
        g: Host graph
        forest: Tree edge ids F (a forest in g)
        terminals: Terminal set S; defaults to the endpoints of the non-tree edges
        non_tree: Non-tree edges N to keep; defaults to every alive edge outside F
    """
    tree = frozenset(forest)
    for eid in tree:
        if not g.is_alive(eid):
            raise InputError(f"forest edge {eid} is not alive")
    kept = frozenset(non_tree) if non_tree is not None else frozenset(
        eid for eid in g.edges() if eid not in tree
    )
    ends: Set[int] = set()
    for eid in kept:
        if eid in tree:
            raise InputError(f"edge {eid} is both tree and non-tree")
        if not g.is_alive(eid):
            raise InputError(f"non-tree edge {eid} is not alive")
        ends.update(g.endpoints(eid))
    terms = frozenset(ends) if terminals is None else frozenset(terminals)
    missing = ends - terms
    if missing:
        raise InputError(f"terminal set misses non-tree endpoints {sorted(missing)[:5]}")

    system = connecting_paths(g, tree, terms)
    order = sorted(terms | system.endpoints())
    index = {v: i for i, v in enumerate(order)}
    contracted = Graph(len(order))

    for eid in sorted(kept):
        u, v = g.endpoints(eid)
        contracted.add_edge(index[u], index[v], g.key(eid), eid)

    next_id = max(g.max_edge_id(), max(kept, default=-1)) + 1
    super_edges: Dict[int, SuperEdge] = {}
    covered_by: Dict[int, int] = {}
    for path in system.paths:
        heaviest = max(path.edges, key=g.key)
        a, b = path.ends
        contracted.add_edge(index[a], index[b], g.key(heaviest), next_id)
        super_edges[next_id] = SuperEdge(next_id, (a, b), path.edges, heaviest)
        for eid in path.edges:
            covered_by[eid] = next_id
        next_id += 1

    if assert_level() >= 1 and contracted.num_edges() > len(kept) + 2 * len(terms):
        raise InvariantViolation(
            f"contracted graph has {contracted.num_edges()} edges, "
            f"bound is {len(kept) + 2 * len(terms)}"
        )
    return ContractedPair(contracted, order, index, super_edges, kept, covered_by)


# -- two-phase contractors -------------------------------------------------------


class ContractorState(str, Enum):
    READY = "ready"
    OCCUPIED = "occupied"
    FREE = "free"


class TwoPhaseContractor:
    """
    Forest tracker that can freeze into a contraction

    In phase 1 the contractor follows link/cut updates of the forest. A
    ready contractor applies them immediately; a free one buffers them and
    replays the buffer in small steps. contract() switches to phase 2, after
    which cover queries are answered against the frozen contraction until
    release() returns the contractor to phase 1.
    """

    def __init__(self, graph: Any, forest: Iterable[int], label: str = ""):
        self.graph = graph
        self.label = label
        self._forest: Set[int] = set(forest)
        self._pending: Deque[Tuple[str, int]] = deque()
        self.state = ContractorState.READY
        self._pair: Optional[ContractedPair] = None

    @property
    def phase(self) -> int:
        return 2 if self.state is ContractorState.OCCUPIED else 1

    @property
    def pending(self) -> int:
        return len(self._pending)

    def forest(self) -> FrozenSet[int]:
        return frozenset(self._forest)

    def _apply(self, op: str, eid: int) -> None:
        if op == "link":
            self._forest.add(eid)
        else:
            self._forest.discard(eid)

    def record(self, op: str, eid: int) -> None:
        if self.state is ContractorState.READY:
            self._apply(op, eid)
        else:
            self._pending.append((op, eid))

    def catch_up(self, limit: Optional[int] = None) -> int:
        """Replay up to `limit` buffered updates; a drained free contractor becomes ready"""
        if self.state is ContractorState.OCCUPIED:
            return 0
        replayed = 0
        while self._pending and (limit is None or replayed < limit):
            self._apply(*self._pending.popleft())
            replayed += 1
        if not self._pending:
            self.state = ContractorState.READY
        return replayed

    def contract(self, non_tree: Iterable[int]) -> ContractedPair:
        if self.state is not ContractorState.READY:
            raise StateError(f"contractor {self.label} is {self.state.value}, not ready")
        self._pair = contract(self.graph, self._forest, non_tree=non_tree)
        self.state = ContractorState.OCCUPIED
        return self._pair

    def cover_query(self, eid: int) -> Optional[SuperEdge]:
        if self._pair is None or self.state is not ContractorState.OCCUPIED:
            raise StateError("cover queries need a phase-2 contractor")
        return self._pair.cover(eid)

    def release(self) -> None:
        if self.state is not ContractorState.OCCUPIED:
            raise StateError(f"contractor {self.label} is not occupied")
        self._pair = None
        self.state = ContractorState.FREE if self._pending else ContractorState.READY


def cover_query(contractor: TwoPhaseContractor, eid: int) -> Optional[SuperEdge]:
    return contractor.cover_query(eid)



# -- few non-tree edges --------------------------------------------------------


CONTRACTORS_PER_LEVEL = 6


@dataclass
class _Group:
    level: int
    members: Set[int]
    contractor: Optional[TwoPhaseContractor] = None
    pair: Optional[ContractedPair] = None
    engine: Optional[DecrementalMsf] = None
    built_at: int = -1


@dataclass(frozen=True)
class GroupInfo:
    level: int
    size: int
    super_edges: int
    built_at: int


@dataclass
class FewNonTreeStats:
    updates: int = 0
    builds: int = 0
    merges: int = 0
    forwarded: int = 0
    ejected: int = 0
    max_non_tree: int = 0


class FewNonTreeMsf:
    """
    Fully dynamic MSF for graphs with at most k non-tree edges

    The forest F lives in a DynamicForest. Non-tree edges are split into
    groups on levels 0..L; a level-i group holds at most 2^(i+1)·B edges
    and the single top-level group at most k. Every group owns a contracted
    graph of (F, its edges) and a decremental MSF instance on it, built by
    `factory`. Afterwards a group only receives deletions:

    - a deleted member is deleted from the group's instance;
    - a tree edge on none of the group's paths leaves the group untouched;
    - a tree edge on a path removes that path's super edge, and every
      member the instance brings in as a replacement leaves the group.

    The members that leave are exactly the group's edges crossing the cut
    of the removed tree edge. The lightest of them over all groups takes
    the tree edge's place, the rest form the group built at this update.
    Engines are built only for those fresh groups and for merges.
    """

    def __init__(
        self,
        graph: Graph,
        k: int,
        batch_size: int,
        factory: Optional[DecrementalFactory] = None,
        failure_p: Optional[float] = None,
        copy: bool = True,
        meter: Optional[WorkMeter] = None,
    ):
        """
        Initialize on a graph

        Args:
            graph: Initial graph, at most k non-tree edges
            k: Non-tree edge capacity
            batch_size: Largest insertion batch B
            factory: Builds the decremental MSF of a contracted graph
            failure_p: Overall failure parameter p; p' = p / (c0 L) is published
            copy: Work on a private copy of graph
            meter: Work meter charged by group maintenance
        """
        if k < 1:
            raise InputError("non-tree capacity k must be positive")
        if batch_size < 1:
            raise InputError("batch size must be positive")
        settings = get_settings().few_nontree
        self.graph = graph.copy() if copy else graph
        self.k = k
        self.batch_size = batch_size
        self.factory: DecrementalFactory = factory or multigraph_factory
        self.top = max(1, math.ceil(math.log2(max(k, 2))))
        self.failure_p = settings.failure_p if failure_p is None else failure_p
        self.level_failure_p = self.failure_p / (settings.c0 * self.top)
        self.stats = FewNonTreeStats()
        self.meter = meter if meter is not None else WorkMeter()

        recommended = 5 * math.ceil(math.log2(max(k, 2)))
        if batch_size < recommended:
            logger.debug("batch_below_recommended", batch_size=batch_size, recommended=recommended)

        tree = kruskal(self.graph)
        non_tree = {eid for eid in self.graph.edges() if eid not in tree}
        if len(non_tree) > k:
            raise CapacityExceeded("non-tree edges at init", len(non_tree), k)

        self.forest = DynamicForest(self.graph.num_nodes(), grow=True)
        self._tree: Set[int] = set()
        for eid in sorted(tree):
            self._link(eid, record=False)

        self._pool: List[List[TwoPhaseContractor]] = [
            [
                TwoPhaseContractor(self.graph, self._tree, label=f"{i}.{j}")
                for j in range(1, CONTRACTORS_PER_LEVEL + 1)
            ]
            for i in range(self.top + 1)
        ]
        self._levels: List[List[_Group]] = [[] for _ in range(self.top + 1)]
        self._group_of: Dict[int, _Group] = {}
        if non_tree:
            self._add_group(self.top, non_tree)
        self._build_pending()
        self.stats.max_non_tree = len(non_tree)
        self._check()
        logger.debug(
            "few_nontree_init",
            nodes=self.graph.num_nodes(),
            edges=self.graph.num_edges(),
            non_tree=len(non_tree),
            k=k,
            batch_size=batch_size,
            levels=self.top,
        )

    # -- forest bookkeeping ----------------------------------------------

    def _link(self, eid: int, record: bool = True) -> None:
        u, v = self.graph.endpoints(eid)
        self.forest.link(u, v, eid, self.graph.key(eid))
        self._tree.add(eid)
        if record:
            self._record("link", eid)

    def _cut(self, eid: int) -> None:
        self.forest.cut(eid)
        self._tree.discard(eid)
        self._record("cut", eid)

    def _record(self, op: str, eid: int) -> None:
        for level in self._pool:
            for contractor in level:
                contractor.record(op, eid)

    # -- groups ----------------------------------------------------------

    def _cap(self, level: int) -> int:
        return self.k if level == self.top else min(2 ** (level + 1) * self.batch_size, self.k)

    def _add_group(self, level: int, members: Iterable[int]) -> _Group:
        group = _Group(level, set(members))
        for eid in group.members:
            self._group_of[eid] = group
        self._levels[level].append(group)
        return group

    def _place(self, members: Sequence[int]) -> _Group:
        """New group on the lowest level whose cap fits; level 0 for at most 2B edges"""
        level = next(i for i in range(self.top + 1) if len(members) <= self._cap(i))
        return self._add_group(level, members)

    def _drop_group(self, group: _Group) -> None:
        if group.contractor is not None:
            group.contractor.release()
            group.contractor = None
        self._levels[group.level].remove(group)

    def _acquire(self, level: int) -> TwoPhaseContractor:
        for contractor in self._pool[level]:
            if contractor.state is ContractorState.READY:
                return contractor
        raise InvariantViolation(f"no ready contractor on level {level}")

    def _build(self, group: _Group) -> None:
        contractor = self._acquire(group.level)
        group.pair = contractor.contract(group.members)
        group.contractor = contractor
        group.engine = self.factory(group.pair.graph)
        group.built_at = self.stats.updates
        self.meter.charge(group.pair.graph.num_edges())
        self.stats.builds += 1

    def _build_pending(self) -> None:
        for level in self._levels:
            for group in list(level):
                if not group.members:
                    self._drop_group(group)
        for level in self._levels:
            for group in level:
                if group.engine is None:
                    self._build(group)

    def _detach(self, group: _Group, eid: int) -> List[int]:
        """
        Remove tree edge eid from a group's contracted graph

        Returns the members that crossed the cut of eid. They are deleted
        from the group's instance one by one until it finds no replacement.
        """
        assert group.pair is not None and group.engine is not None
        sup = group.pair.split(eid)
        if sup is None:
            return []
        change = group.engine.delete(sup.eid)
        self.stats.forwarded += 1
        self.meter.charge()
        ejected: List[int] = []
        queue = [r for r in change.added if r in group.members]
        while queue:
            r = queue.pop()
            group.members.discard(r)
            group.pair.discard(r)
            del self._group_of[r]
            ejected.append(r)
            change = group.engine.delete(r)
            self.stats.forwarded += 1
            self.meter.charge()
            queue.extend(x for x in change.added if x in group.members)
        self.stats.ejected += len(ejected)
        return ejected

    def _cleanup(self) -> None:
        """Merge groups upward so no level below the top keeps more than two"""
        for i in range(self.top):
            level = self._levels[i]
            while len(level) > 2:
                first, second = level[0], level[1]
                merged = first.members | second.members
                self._drop_group(first)
                self._drop_group(second)
                self._add_group(i + 1, merged)
                self.stats.merges += 1
        top = self._levels[self.top]
        if len(top) > 1:
            merged = set().union(*(group.members for group in top))
            for group in list(top):
                self._drop_group(group)
            self._add_group(self.top, merged)
            self.stats.merges += 1

    def _tick(self) -> None:
        """Released contractors replay their backlog, so every level keeps a ready one"""
        for level in self._pool:
            for contractor in level:
                if contractor.state is ContractorState.FREE:
                    self.meter.charge(contractor.catch_up())

    def _finish(self) -> None:
        self._cleanup()
        self._build_pending()
        self._tick()
        self.stats.updates += 1
        self.stats.max_non_tree = max(self.stats.max_non_tree, len(self._group_of))
        self._check()

    def _check(self) -> None:
        level = assert_level()
        if level < 1:
            return
        union: Set[int] = set()
        for i, groups in enumerate(self._levels):
            cap = self._cap(i)
            for group in groups:
                if len(group.members) > cap:
                    raise InvariantViolation(
                        f"level {i} group holds {len(group.members)} edges, cap {cap}"
                    )
                if union & group.members:
                    raise InvariantViolation("non-tree edge stored in two groups")
                union |= group.members
                if level >= 2 and group.engine is not None and group.pair is not None:
                    if group.engine.forest_edges() != group.pair.forest:
                        raise InvariantViolation(
                            f"level {i} group forest is not its super edges"
                        )
        if union != set(self._group_of):
            raise InvariantViolation("group membership index out of sync")
        if level >= 2:
            if self._tree != set(kruskal(self.graph)):
                raise InvariantViolation("forest diverged from Kruskal")
            alive = set(self.graph.edges())
            if union != alive - self._tree:
                raise InvariantViolation("groups do not partition the non-tree edges")

    # -- public interface ------------------------------------------------

    def forest_edges(self) -> FrozenSet[int]:
        return frozenset(self._tree)

    def non_tree_count(self) -> int:
        return len(self._group_of)

    def level_sizes(self) -> Dict[Tuple[int, int], int]:
        """(level, slot) -> number of non-tree edges in that group"""
        return {
            (i, j): len(group.members)
            for i, groups in enumerate(self._levels)
            for j, group in enumerate(groups, start=1)
        }

    def level_caps(self) -> Dict[int, int]:
        return {i: self._cap(i) for i in range(self.top + 1)}

    def groups(self) -> List[GroupInfo]:
        return [
            GroupInfo(
                group.level,
                len(group.members),
                0 if group.pair is None else len(group.pair.super_edges),
                group.built_at,
            )
            for group in self._all_groups()
        ]

    def contractor_states(self) -> Dict[str, int]:
        counts = {state.value: 0 for state in ContractorState}
        for level in self._pool:
            for contractor in level:
                counts[contractor.state.value] += 1
        return counts

    def insert_batch(self, edges: Sequence[Tuple[Any, ...]]) -> MsfDelta:
        """
        Insert up to B edges given as (u, v, w) or (u, v, w, eid)

        Each edge either links two trees, replaces the heaviest edge on its
        tree path, or becomes non-tree. A replaced tree edge is detached
        from every group whose paths use it. Everything that ends up
        non-tree or leaves a group forms the group built at this update.
        """
        if len(edges) > self.batch_size:
            raise InputError(f"batch of {len(edges)} exceeds B = {self.batch_size}")
        needed = len(self._group_of) + len(edges)
        if needed > self.k:
            raise CapacityExceeded("non-tree edges after batch", needed, self.k)
        for record in edges:
            if len(record) not in (3, 4):
                raise InputError(f"malformed edge record {record!r}")
            u, v = record[0], record[1]
            if u == v or u < 0 or v < 0:
                raise InputError(f"invalid endpoints ({u}, {v})")

        delta = MsfDelta()
        released: List[int] = []
        for record in edges:
            u, v, w = record[0], record[1], record[2]
            eid = record[3] if len(record) == 4 else None
            while self.graph.num_nodes() <= max(u, v):
                self.graph.add_node()
            eid = self.graph.add_edge(u, v, w, eid)
            if not self.forest.connected(u, v):
                self._link(eid)
                delta = delta.then(MsfDelta(added=(eid,)))
                continue
            heaviest = self.forest.path_max(u, v)
            assert heaviest is not None
            if self.graph.key(eid) < self.graph.key(heaviest):
                for group in self._all_groups():
                    released.extend(self._detach(group, heaviest))
                self._cut(heaviest)
                self._link(eid)
                released.append(heaviest)
                delta = delta.then(MsfDelta(removed=(heaviest,), added=(eid,)))
            else:
                released.append(eid)

        if released:
            self._place(released)
        self._finish()
        return delta

    def insert(self, u: int, v: int, w: Any, eid: Optional[int] = None) -> MsfDelta:
        record: Tuple[Any, ...] = (u, v, w) if eid is None else (u, v, w, eid)
        return self.insert_batch([record])

    def delete(self, eid: int) -> MsfDelta:
        """Delete an alive edge; a tree edge is replaced by the lightest reconnecting edge"""
        if not self.graph.is_alive(eid):
            raise InputError(f"edge {eid} is not alive")

        if eid not in self._tree:
            group = self._group_of.pop(eid)
            self.graph.delete_edge(eid)
            group.members.discard(eid)
            assert group.pair is not None and group.engine is not None
            group.pair.discard(eid)
            change = group.engine.delete(eid)
            self.stats.forwarded += 1
            self.meter.charge()
            if change.added and assert_level() >= 1:
                raise InvariantViolation(f"deleting non-tree edge {eid} changed a group forest")
            self._finish()
            return MsfDelta()

        candidates: List[int] = []
        for group in self._all_groups():
            candidates.extend(self._detach(group, eid))

        self.graph.delete_edge(eid)
        self._cut(eid)
        if not candidates:
            self._finish()
            return MsfDelta(removed=(eid,))

        best = min(candidates, key=self.graph.key)
        if assert_level() >= 1 and self.forest.connected(*self.graph.endpoints(best)):
            raise InvariantViolation(f"edge {best} does not reconnect the cut of {eid}")
        candidates.remove(best)
        self._link(best)
        if candidates:
            self._place(candidates)
        self._finish()
        return MsfDelta(removed=(eid,), added=(best,))

    def _all_groups(self) -> List[_Group]:
        return [group for level in self._levels for group in level]

    def get_info(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "batch_size": self.batch_size,
            "levels": self.top,
            "failure_p": self.failure_p,
            "level_failure_p": self.level_failure_p,
            "non_tree": self.non_tree_count(),
            "groups": len(self._all_groups()),
            "contractors": self.contractor_states(),
            "builds": self.stats.builds,
            "merges": self.stats.merges,
            "forwarded": self.stats.forwarded,
            "ejected": self.stats.ejected,
        }


# -- bounded-sequence decremental to unbounded ----------------------------------


class PhaseRebuildingMsf:
    """
    Decremental MSF for unbounded deletion sequences

    The inner algorithm may only be trusted for `bound` deletions. The
    active instance serves updates. Once it has seen bound // 2 deletions
    the graph is copied into a staging graph one slice of edges per
    step; deletions of edges already staged are applied to the copy. When
    the copy is complete the shadow instance is built on it and follows
    every later deletion. After bound deletions the shadow takes over, so
    no instance ever exceeds its bound.
    """

    def __init__(
        self,
        graph: Graph,
        factory: DecrementalFactory,
        bound: Optional[int] = None,
        meter: Optional[WorkMeter] = None,
    ):
        self.graph = graph
        self.factory = factory
        self.bound = max(0, graph.num_edges() if bound is None else bound)
        self.half = self.bound // 2
        self.window = max(1, self.half // 2)
        self.meter = meter if meter is not None else WorkMeter()
        self._ids = sorted(graph.edges())
        self._position = {eid: i for i, eid in enumerate(self._ids)}
        self.span = len(self._ids)
        self.slice = max(1, math.ceil(self.span / self.window))
        self.rebuilds = 0
        self._active = factory(graph.copy())
        self._active_count = 0
        self._shadow: Optional[DecrementalMsf] = None
        self._shadow_count = 0
        self._staging: Optional[Graph] = None
        self._cursor = 0

    @property
    def step_bound(self) -> int:
        """Work units charged per deletion on top of the inner algorithms' own"""
        return self.slice + 2

    @property
    def staging(self) -> bool:
        return self._staging is not None

    def forest_edges(self) -> FrozenSet[int]:
        return self._active.forest_edges()

    def _stage(self) -> int:
        """Copy the next slice of edges; builds the shadow once the copy is complete"""
        assert self._staging is not None
        end = min(self.span, self._cursor + self.slice)
        for eid in self._ids[self._cursor : end]:
            if self.graph.is_alive(eid):
                u, v = self.graph.endpoints(eid)
                self._staging.add_edge(u, v, self.graph.weight(eid), eid)
        copied = end - self._cursor
        self._cursor = end
        if self._cursor >= self.span:
            self._shadow = self.factory(self._staging)
            self._shadow_count = 0
            self._staging = None
            self.rebuilds += 1
        return copied

    def _begin_staging(self) -> None:
        self._staging = Graph(self.graph.num_nodes())
        self._cursor = 0

    def delete(self, eid: int) -> MsfDelta:
        if not self.graph.is_alive(eid):
            raise InputError(f"edge {eid} is not alive")
        staged = self._staging is not None and self._position[eid] < self._cursor
        self.graph.delete_edge(eid)

        if self.half < 1:
            before = self._active.forest_edges()
            self._active = self.factory(self.graph.copy())
            self.rebuilds += 1
            self.meter.charge(self.step_bound)
            return forest_delta(before, self._active.forest_edges())

        delta = self._active.delete(eid)
        self._active_count += 1
        calls = 1
        if self._staging is not None:
            if staged:
                self._staging.delete_edge(eid)
            self.meter.charge(self._stage())
        elif self._shadow is not None:
            self._shadow.delete(eid)
            self._shadow_count += 1
            calls += 1
        self.meter.charge(calls)

        if self._active_count >= 2 * self.half:
            if self._shadow is None:
                raise InvariantViolation("shadow instance was not built in time")
            if assert_level() >= 1 and self._shadow.forest_edges() != self._active.forest_edges():
                raise InvariantViolation("shadow forest differs from the active one")
            self._active, self._active_count = self._shadow, self._shadow_count
            self._shadow = None
        if (
            self._shadow is None
            and self._staging is None
            and self._active_count >= self.half
        ):
            self._begin_staging()
        return delta


def restricted_from_decremental(
    factory: DecrementalFactory, bound: Optional[Callable[[int], int]] = None
) -> DecrementalFactory:
    """
    Wrap a decremental algorithm that tolerates only bound(m) deletions

    The result builds PhaseRebuildingMsf instances; with no bound the inner
    algorithm is trusted for m deletions.
    """

    def build(graph: Graph) -> DecrementalMsf:
        limit = None if bound is None else bound(graph.num_edges())
        return PhaseRebuildingMsf(graph, factory, limit)

    return build

#!/usr/bin/env python3
"""
dynmsf - MSF Support Structures
===============================

Copyright (c) 2026 dynmsf developers.

Building blocks shared by every dynamic minimum spanning forest structure in
the package.

Features:
- Union-find and Kruskal's algorithm (the reference MSF oracle)
- DynamicForest: link-cut trees with path-maximum queries over edge keys
- MultigraphMsf: fully dynamic MSF for small multigraphs
- SCoveredMsf: decremental MSF when every non-tree edge touches a small set S
- KruskalReplay: step-by-step recomputation oracle

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Optional, Set, Tuple

from .config import assert_level
from .exceptions import InputError, InvariantViolation
from .graph_core import EdgeKey, Graph, WorkMeter
from .logging_setup import get_logger

logger = get_logger(__name__)


class UnionFind:
    """Disjoint sets over hashable items with path halving and union by size"""

    def __init__(self, items: Iterable[Hashable] = ()):
        self._parent: Dict[Hashable, Hashable] = {}
        self._size: Dict[Hashable, int] = {}
        for item in items:
            self.add(item)

    def add(self, item: Hashable) -> None:
        if item not in self._parent:
            self._parent[item] = item
            self._size[item] = 1

    def __contains__(self, item: object) -> bool:
        return item in self._parent

    def find(self, item: Hashable) -> Hashable:
        parent = self._parent
        if item not in parent:
            self.add(item)
            return item
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a: Hashable, b: Hashable) -> bool:
        """Merge the sets of a and b; False if they were already together"""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        return True

    def connected(self, a: Hashable, b: Hashable) -> bool:
        return self.find(a) == self.find(b)

    def groups(self) -> List[Set[Hashable]]:
        buckets: Dict[Hashable, Set[Hashable]] = {}
        for item in self._parent:
            buckets.setdefault(self.find(item), set()).add(item)
        return list(buckets.values())


def kruskal(g: Any, edges: Optional[Iterable[int]] = None) -> FrozenSet[int]:
    """
    Minimum spanning forest under the (weight, edge id) order

    Args:
        g: Graph or view supplying endpoints and weights
        edges: Restrict to these edge ids (default: every alive edge)
    """
    candidates = list(g.edges()) if edges is None else list(edges)
    candidates.sort(key=lambda e: (g.weight(e), e))
    sets = UnionFind()
    chosen = []
    for eid in candidates:
        u, v = g.endpoints(eid)
        if sets.union(u, v):
            chosen.append(eid)
    return frozenset(chosen)


@dataclass(frozen=True)
class MsfDelta:
    """Change of a maintained forest caused by one update"""

    removed: Tuple[int, ...] = ()
    added: Tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.removed or self.added)

    def then(self, other: "MsfDelta") -> "MsfDelta":
        """Compose two consecutive deltas, cancelling edges added then removed"""
        removed = list(self.removed)
        added = list(self.added)
        for eid in other.removed:
            if eid in added:
                added.remove(eid)
            else:
                removed.append(eid)
        for eid in other.added:
            if eid in removed:
                removed.remove(eid)
            else:
                added.append(eid)
        return MsfDelta(tuple(removed), tuple(added))


def forest_delta(old: Iterable[int], new: Iterable[int]) -> MsfDelta:
    before, after = set(old), set(new)
    return MsfDelta(tuple(sorted(before - after)), tuple(sorted(after - before)))


class DynamicForest:
    """
    Link-cut trees over a dynamic forest

    Tree edges are represented as extra splay nodes carrying the edge key,
    so path aggregates are maxima over edge keys. Unknown node ids are
    rejected unless the forest was created with grow=True.
    """

    _NIL = -1

    def __init__(self, n: int = 0, grow: bool = False):
        """
        Args:
            n: Nodes 0..n-1 are created up front
            grow: Create unknown nodes on first use instead of rejecting them
        """
        self._grow = grow
        self._left: List[int] = []
        self._right: List[int] = []
        self._parent: List[int] = []
        self._flip: List[bool] = []
        self._key: List[Optional[EdgeKey]] = []
        self._best: List[int] = []
        self._free: List[int] = []
        self._num_nodes = 0
        self._slot: Dict[int, int] = {}
        self._ends: Dict[int, Tuple[int, int]] = {}
        self._node_slot: Dict[int, int] = {}
        self._owner: Dict[int, int] = {}
        for v in range(n):
            self.add_node(v)

    # -- slots -----------------------------------------------------------

    def _new_slot(self, key: Optional[EdgeKey]) -> int:
        if self._free:
            x = self._free.pop()
            self._left[x] = self._right[x] = self._parent[x] = self._NIL
            self._flip[x] = False
            self._key[x] = key
            self._best[x] = x if key is not None else self._NIL
            return x
        self._left.append(self._NIL)
        self._right.append(self._NIL)
        self._parent.append(self._NIL)
        self._flip.append(False)
        self._key.append(key)
        x = len(self._key) - 1
        self._best.append(x if key is not None else self._NIL)
        return x

    def add_node(self, v: int) -> None:
        if v not in self._node_slot:
            self._node_slot[v] = self._new_slot(None)
            self._num_nodes += 1

    def _vertex(self, v: int) -> int:
        slot = self._node_slot.get(v)
        if slot is None:
            if not self._grow:
                raise InputError(f"unknown node {v!r}")
            self.add_node(v)
            slot = self._node_slot[v]
        return slot

    # -- splay machinery -------------------------------------------------

    def _is_root(self, x: int) -> bool:
        p = self._parent[x]
        return p == self._NIL or (self._left[p] != x and self._right[p] != x)

    def _push(self, x: int) -> None:
        if self._flip[x]:
            left, right = self._left[x], self._right[x]
            self._left[x], self._right[x] = right, left
            if left != self._NIL:
                self._flip[left] = not self._flip[left]
            if right != self._NIL:
                self._flip[right] = not self._flip[right]
            self._flip[x] = False

    def _heavier(self, a: int, b: int) -> int:
        if a == self._NIL:
            return b
        if b == self._NIL:
            return a
        return a if self._key[a] > self._key[b] else b  # type: ignore[operator]

    def _pull(self, x: int) -> None:
        best = x if self._key[x] is not None else self._NIL
        left, right = self._left[x], self._right[x]
        if left != self._NIL:
            best = self._heavier(best, self._best[left])
        if right != self._NIL:
            best = self._heavier(best, self._best[right])
        self._best[x] = best

    def _rotate(self, x: int) -> None:
        p = self._parent[x]
        g = self._parent[p]
        if not self._is_root(p):
            if self._left[g] == p:
                self._left[g] = x
            else:
                self._right[g] = x
        self._parent[x] = g
        if self._left[p] == x:
            child = self._right[x]
            self._left[p] = child
            self._right[x] = p
        else:
            child = self._left[x]
            self._right[p] = child
            self._left[x] = p
        if child != self._NIL:
            self._parent[child] = p
        self._parent[p] = x
        self._pull(p)
        self._pull(x)

    def _splay(self, x: int) -> None:
        stack = [x]
        y = x
        while not self._is_root(y):
            y = self._parent[y]
            stack.append(y)
        for node in reversed(stack):
            self._push(node)
        while not self._is_root(x):
            p = self._parent[x]
            if not self._is_root(p):
                g = self._parent[p]
                if (self._left[g] == p) == (self._left[p] == x):
                    self._rotate(p)
                else:
                    self._rotate(x)
            self._rotate(x)

    def _access(self, x: int) -> None:
        last = self._NIL
        y = x
        while y != self._NIL:
            self._splay(y)
            self._right[y] = last
            self._pull(y)
            last = y
            y = self._parent[y]
        self._splay(x)

    def _make_root(self, x: int) -> None:
        self._access(x)
        self._flip[x] = not self._flip[x]
        self._push(x)

    def _find_root(self, x: int) -> int:
        self._access(x)
        while True:
            self._push(x)
            if self._left[x] == self._NIL:
                break
            x = self._left[x]
        self._splay(x)
        return x

    def _link(self, x: int, y: int) -> None:
        self._make_root(x)
        self._parent[x] = y

    def _cut(self, x: int, y: int) -> None:
        self._make_root(x)
        self._access(y)
        if self._left[y] != x or self._right[x] != self._NIL:
            raise InvariantViolation("cut on non-adjacent forest slots")
        self._left[y] = self._NIL
        self._parent[x] = self._NIL
        self._pull(y)

    # -- public interface ------------------------------------------------

    def connected(self, u: int, v: int) -> bool:
        if u == v:
            return True
        return self._find_root(self._vertex(u)) == self._find_root(self._vertex(v))

    def link(self, u: int, v: int, eid: int, key: EdgeKey) -> None:
        """Add tree edge eid between u and v; they must be disconnected"""
        if eid in self._slot:
            raise InputError(f"edge {eid} already in forest")
        if self.connected(u, v):
            raise InputError(f"link of {u} and {v} would close a cycle")
        x, y = self._vertex(u), self._vertex(v)
        s = self._new_slot(key)
        self._slot[eid] = s
        self._owner[s] = eid
        self._ends[eid] = (u, v)
        self._link(x, s)
        self._link(s, y)

    def cut(self, eid: int) -> Tuple[int, int]:
        """Remove tree edge eid and return its endpoints"""
        s = self._slot.pop(eid, None)
        if s is None:
            raise InputError(f"edge {eid} is not a forest edge")
        u, v = self._ends.pop(eid)
        self._cut(self._node_slot[u], s)
        self._cut(s, self._node_slot[v])
        del self._owner[s]
        self._free.append(s)
        return u, v

    def path_max(self, u: int, v: int) -> Optional[int]:
        """Heaviest edge id on the u-v tree path, or None if disconnected"""
        if u == v:
            raise InputError("path_max needs two distinct nodes")
        if not self.connected(u, v):
            return None
        x, y = self._vertex(u), self._vertex(v)
        self._make_root(x)
        self._access(y)
        best = self._best[y]
        return None if best == self._NIL else self._owner[best]

    def has_edge(self, eid: int) -> bool:
        return eid in self._slot

    def edges(self) -> FrozenSet[int]:
        return frozenset(self._slot)

    def endpoints(self, eid: int) -> Tuple[int, int]:
        return self._ends[eid]

    def __len__(self) -> int:
        return len(self._slot)


def _pair(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


class MultigraphMsf:
    """
    Fully dynamic MSF for small multigraphs

    Non-tree edges are kept in one lazy heap per endpoint pair, so parallel
    edges cost nothing extra when a replacement is searched. A tree-edge
    deletion walks both halves of the split tree in lockstep and scans the
    pair heaps of whichever half finishes first.
    """

    def __init__(
        self, graph: Graph, copy: bool = True, meter: Optional[WorkMeter] = None
    ):
        """
        Initialize the structure on a graph

        Args:
            graph: Initial multigraph
            copy: Work on a private copy of graph
            meter: Work meter charged for replacement scans
        """
        self.graph = graph.copy() if copy else graph
        self.meter = meter if meter is not None else WorkMeter()
        self.forest = DynamicForest(self.graph.num_nodes(), grow=True)
        self._tree_adj: Dict[int, Dict[int, int]] = {}
        self._pairs: Dict[Tuple[int, int], List[EdgeKey]] = {}
        self._partners: Dict[int, Set[int]] = {}

        tree = kruskal(self.graph)
        for eid in sorted(tree):
            self._link(eid)
        for eid in self.graph.edges():
            if eid not in tree:
                self._park(eid)

    # -- internals -------------------------------------------------------

    def _link(self, eid: int) -> None:
        u, v = self.graph.endpoints(eid)
        self.forest.link(u, v, eid, self.graph.key(eid))
        self._tree_adj.setdefault(u, {})[eid] = v
        self._tree_adj.setdefault(v, {})[eid] = u

    def _unlink(self, eid: int) -> Tuple[int, int]:
        u, v = self.forest.cut(eid)
        del self._tree_adj[u][eid]
        del self._tree_adj[v][eid]
        return u, v

    def _park(self, eid: int) -> None:
        u, v = self.graph.endpoints(eid)
        heapq.heappush(self._pairs.setdefault(_pair(u, v), []), self.graph.key(eid))
        self._partners.setdefault(u, set()).add(v)
        self._partners.setdefault(v, set()).add(u)

    def _lightest_parked(self, u: int, v: int) -> Optional[int]:
        key = _pair(u, v)
        heap = self._pairs.get(key)
        while heap:
            eid = heap[0][1]
            if self.graph.is_alive(eid) and not self.forest.has_edge(eid):
                return int(eid)
            heapq.heappop(heap)
        self._pairs.pop(key, None)
        self._partners.get(u, set()).discard(v)
        self._partners.get(v, set()).discard(u)
        return None

    def _smaller_side(self, u: int, v: int) -> Set[int]:
        sides = [{u}, {v}]
        queues = [deque([u]), deque([v])]
        while True:
            for i in (0, 1):
                if not queues[i]:
                    return sides[i]
                x = queues[i].popleft()
                self.meter.charge()
                for _, y in self._tree_adj.get(x, {}).items():
                    if y not in sides[i]:
                        sides[i].add(y)
                        queues[i].append(y)

    def _replacement(self, u: int, v: int) -> Optional[int]:
        side = self._smaller_side(u, v)
        best: Optional[int] = None
        for x in side:
            for y in list(self._partners.get(x, ())):
                self.meter.charge()
                if y in side:
                    continue
                candidate = self._lightest_parked(x, y)
                if candidate is not None and (
                    best is None or self.graph.key(candidate) < self.graph.key(best)
                ):
                    best = candidate
        return best

    def _check(self) -> None:
        if assert_level() >= 2 and self.forest.edges() != kruskal(self.graph):
            raise InvariantViolation("multigraph MSF diverged from Kruskal")

    # -- public interface ------------------------------------------------

    def insert(self, u: int, v: int, w: Any, eid: Optional[int] = None) -> MsfDelta:
        """Insert an edge; returns the forest change"""
        while self.graph.num_nodes() <= max(u, v):
            self.graph.add_node()
        eid = self.graph.add_edge(u, v, w, eid)
        if not self.forest.connected(u, v):
            self._link(eid)
            delta = MsfDelta(added=(eid,))
        else:
            heaviest = self.forest.path_max(u, v)
            assert heaviest is not None
            if self.graph.key(eid) < self.graph.key(heaviest):
                self._unlink(heaviest)
                self._park(heaviest)
                self._link(eid)
                delta = MsfDelta(removed=(heaviest,), added=(eid,))
            else:
                self._park(eid)
                delta = MsfDelta()
        self._check()
        return delta

    def delete(self, eid: int) -> MsfDelta:
        """Delete an alive edge; returns the forest change"""
        if not self.graph.is_alive(eid):
            raise InputError(f"edge {eid} is not alive")
        self.graph.delete_edge(eid)
        if not self.forest.has_edge(eid):
            self._check()
            return MsfDelta()
        u, v = self._unlink(eid)
        replacement = self._replacement(u, v)
        if replacement is None:
            self._check()
            return MsfDelta(removed=(eid,))
        self._link(replacement)
        self._check()
        return MsfDelta(removed=(eid,), added=(replacement,))

    def forest_edges(self) -> FrozenSet[int]:
        return self.forest.edges()

    def in_forest(self, eid: int) -> bool:
        return self.forest.has_edge(eid)

    def non_tree_edges(self) -> Set[int]:
        return {e for e in self.graph.edges() if not self.forest.has_edge(e)}


class SCoveredMsf:
    """
    Decremental MSF when every non-tree edge has exactly one endpoint in S

    Nodes outside S must have bounded degree. Replacement search scans only
    the non-tree edges hanging off S; the work meter counts those scans.
    """

    def __init__(
        self,
        graph: Graph,
        covered: Iterable[int],
        copy: bool = True,
        max_outside_degree: int = 3,
        meter: Optional[WorkMeter] = None,
    ):
        """
        Initialize on a graph and its distinguished set

        Args:
            graph: Initial graph
            covered: The node set S
            copy: Work on a private copy of graph
            max_outside_degree: Degree bound enforced on nodes outside S
            meter: Work meter charged per scanned S-incident edge
        """
        self.graph = graph.copy() if copy else graph
        self.covered: FrozenSet[int] = frozenset(covered)
        self.max_outside_degree = max_outside_degree
        self.meter = meter if meter is not None else WorkMeter()
        self.forest = DynamicForest(self.graph.num_nodes(), grow=True)
        self._hanging: Dict[int, Set[int]] = {s: set() for s in self.covered}

        for v in self.graph.nodes():
            if v not in self.covered and self.graph.degree(v) > max_outside_degree:
                raise InputError(
                    f"node {v} outside S has degree {self.graph.degree(v)}"
                )
        tree = kruskal(self.graph)
        for eid in sorted(tree):
            u, v = self.graph.endpoints(eid)
            self.forest.link(u, v, eid, self.graph.key(eid))
        for eid in self.graph.edges():
            if eid not in tree:
                self._hang(eid)

    def _hang(self, eid: int) -> None:
        u, v = self.graph.endpoints(eid)
        inside = [x for x in (u, v) if x in self.covered]
        if len(inside) != 1:
            raise InputError(
                f"non-tree edge {eid} has {len(inside)} endpoints in S, expected 1"
            )
        self._hanging[inside[0]].add(eid)

    def _unhang(self, eid: int) -> None:
        u, v = self.graph.endpoints(eid)
        for x in (u, v):
            if x in self.covered:
                self._hanging[x].discard(eid)

    def delete(self, eid: int) -> MsfDelta:
        if not self.graph.is_alive(eid):
            raise InputError(f"edge {eid} is not alive")
        self.graph.delete_edge(eid)
        if not self.forest.has_edge(eid):
            self._unhang(eid)
            return MsfDelta()
        self.forest.cut(eid)
        best: Optional[int] = None
        for s in sorted(self._hanging):
            for candidate in self._hanging[s]:
                self.meter.charge()
                a, b = self.graph.endpoints(candidate)
                if self.forest.connected(a, b):
                    continue
                if best is None or self.graph.key(candidate) < self.graph.key(best):
                    best = candidate
        if best is None:
            return MsfDelta(removed=(eid,))
        self._unhang(best)
        a, b = self.graph.endpoints(best)
        self.forest.link(a, b, best, self.graph.key(best))
        if assert_level() >= 2 and self.forest.edges() != kruskal(self.graph):
            raise InvariantViolation("S-covered MSF diverged from Kruskal")
        return MsfDelta(removed=(eid,), added=(best,))

    def forest_edges(self) -> FrozenSet[int]:
        return self.forest.edges()

    def in_forest(self, eid: int) -> bool:
        return self.forest.has_edge(eid)


class KruskalReplay:
    """Oracle that recomputes the MSF from scratch after every update"""

    def __init__(self, graph: Graph, copy: bool = True):
        self.graph = graph.copy() if copy else graph
        self._forest: Optional[FrozenSet[int]] = None

    def forest_edges(self) -> FrozenSet[int]:
        if self._forest is None:
            self._forest = kruskal(self.graph)
        return self._forest

    def delete(self, eid: int) -> MsfDelta:
        before = self.forest_edges()
        if not self.graph.is_alive(eid):
            raise InputError(f"edge {eid} is not alive")
        self.graph.delete_edge(eid)
        self._forest = None
        return forest_delta(before, self.forest_edges())

    def insert(self, u: int, v: int, w: Any, eid: Optional[int] = None) -> MsfDelta:
        before = self.forest_edges()
        self.graph.add_edge(u, v, w, eid)
        self._forest = None
        return forest_delta(before, self.forest_edges())

    def insert_batch(self, edges: Iterable[Tuple[int, int, Any, int]]) -> MsfDelta:
        before = self.forest_edges()
        for u, v, w, eid in edges:
            self.graph.add_edge(u, v, w, eid)
        self._forest = None
        return forest_delta(before, self.forest_edges())

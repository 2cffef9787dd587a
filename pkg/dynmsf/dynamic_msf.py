#!/usr/bin/env python3
"""
dynmsf - Recursive Dynamic MSF Engine
=====================================

Copyright (c) 2026 dynmsf developers.

Decremental minimum spanning forest built on the MSF hierarchy: every leaf
cluster runs its own (possibly recursive) engine, every large cluster keeps
a compressed view of itself whose forests are maintained by three
specialised structures, and a sparse sketch graph collects everything that
can ever be an MSF edge. A fully dynamic facade drives the engine through
the few non-tree edge reduction.

Features:
- Engine: preprocessing, deletions, failure reporting and restart
- Compressed clusters with a three-way split by super-node incidence
- Expander pruning on the pieces of every large child
- Sketch graph maintained by a few non-tree edge structure
- JSON stats snapshot validated against a schema
- DynamicMsf: fully dynamic operation with a growing non-tree capacity

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import jsonschema

from .config import assert_level, get_settings
from .contraction import (
    DecrementalFactory,
    DecrementalMsf,
    FewNonTreeMsf,
    restricted_from_decremental,
)
from .decomposition import Hierarchy, msf_decompose
from .exceptions import (
    BudgetExhausted,
    CapacityExceeded,
    EngineFailure,
    InputError,
    InvariantViolation,
    StateError,
)
from .graph_core import Graph, WorkMeter, connected_components, degree_reduce
from .logging_setup import get_logger
from .msf_support import MsfDelta, MultigraphMsf, SCoveredMsf, forest_delta, kruskal
from .pruning import LasVegasPruner, PruningFailure

logger = get_logger(__name__)


# -- parameters ------------------------------------------------------------------


@dataclass(frozen=True)
class EngineParams:
    gamma: int
    alpha: Fraction
    d: int
    s_low: int
    s_high: int
    alpha0: Fraction
    pi: int
    batch_size: int
    deletion_budget: int
    c_h: int
    p: float

    @classmethod
    def create(cls, n: int, m: int, p: Optional[float] = None) -> "EngineParams":
        """Parameters for an n-node, m-edge graph from the engine settings"""
        settings = get_settings()
        engine = settings.engine
        if engine.gamma_override is not None:
            gamma = engine.gamma_override
        else:
            gamma = max(3, math.ceil(math.sqrt(math.log2(max(n, 2)))))
        d = max(3, gamma)
        pi = engine.min_budget
        alpha0 = engine.alpha0()
        return cls(
            gamma=gamma,
            alpha=Fraction(1, gamma**3),
            d=d,
            s_low=gamma,
            s_high=max(gamma, n // gamma),
            alpha0=alpha0 if alpha0 is not None else Fraction(1, gamma**4),
            pi=pi,
            batch_size=engine.c_b * pi * d,
            deletion_budget=max(1, m // (3 * pi * d * gamma)),
            c_h=engine.c_h,
            p=settings.few_nontree.failure_p if p is None else p,
        )

    def sketch_bound(self, n: int) -> int:
        """c_H * n / gamma"""
        return self.c_h * n // self.gamma

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "alpha": str(self.alpha),
            "d": self.d,
            "s_low": self.s_low,
            "s_high": self.s_high,
            "alpha0": str(self.alpha0),
            "pi": self.pi,
            "batch_size": self.batch_size,
            "deletion_budget": self.deletion_budget,
            "c_h": self.c_h,
            "p": self.p,
        }


def deletion_bound(m: int) -> int:
    """Deletions an engine on m edges tolerates before it must be rebuilt"""
    if m <= get_settings().engine.base_threshold:
        return m
    return EngineParams.create(m, m).deletion_budget


def engine_factory(depth: int) -> DecrementalFactory:
    """Decremental algorithm for graphs met at recursion depth `depth`"""

    def build(graph: Graph) -> DecrementalMsf:
        engine = get_settings().engine
        if graph.num_edges() <= engine.base_threshold or depth >= engine.max_depth:
            return MultigraphMsf(graph, copy=False)
        return Engine(graph, depth=depth, copy=False, auto_restart=True)

    return build


def sketch_factory(depth: int) -> DecrementalFactory:
    return restricted_from_decremental(engine_factory(depth), deletion_bound)


# -- compressed clusters -----------------------------------------------------------


EDGE_MOVED = 0
EDGE_PLAIN = 1
EDGE_HANGING = 2
EDGE_SUPER = 3
EDGE_LOOP = 4

EDGE_KIND_NAMES = {
    EDGE_MOVED: "moved",
    EDGE_PLAIN: "plain",
    EDGE_HANGING: "hanging",
    EDGE_SUPER: "super",
    EDGE_LOOP: "loop",
}


@dataclass
class CompressedCluster:
    """
    Compressed view of a large cluster

    Nodes of small children stay as they are, the unpruned nodes of every
    large-child piece collapse into one super node, and pruned nodes drop
    out together with their own edges. Own edges are split by how many
    super-node endpoints they have: none (part 1, together with the forests
    of the small children), one (part 2) or two (part 3); edges inside a
    single super node are loops and belong to no part.
    """

    cid: int
    super_of: Dict[int, int]
    m_small: FrozenSet[int]
    kind: Dict[int, int]
    plain_graph: Graph
    plain_index: Dict[int, int]
    hanging_graph: Graph
    hanging_index: Dict[Tuple[str, int], int]
    super_graph: Graph
    own_at: Dict[int, List[int]] = field(default_factory=dict)

    def edges_of(self, kind: int) -> Set[int]:
        return {eid for eid, k in self.kind.items() if k == kind}

    @property
    def super_nodes(self) -> Set[int]:
        return set(self.super_of.values())

    @property
    def covered(self) -> Set[int]:
        """Local ids of the super nodes in the part-2 graph"""
        return {i for key, i in self.hanging_index.items() if key[0] == "s"}


def compressed_cluster(
    h: Hierarchy,
    g_prime: Graph,
    cid: int,
    super_of: Mapping[int, int],
    small_forests: Mapping[int, Iterable[int]],
    removed: Iterable[int] = (),
    alive: Optional[Graph] = None,
) -> CompressedCluster:
    """
    Build the compressed view of cluster `cid`

    Args:
        h: Hierarchy containing the cluster
        g_prime: Reweighted graph supplying endpoints and weights
        cid: Large cluster to compress
        super_of: Node -> super node id for unpruned nodes of large children
        small_forests: Small child id -> its current forest edges
        removed: The pruned node set U
        alive: Graph deciding which edges still exist (default g_prime)
    """
    cluster = h.clusters[cid]
    if cluster.is_leaf:
        raise InputError(f"cluster {cid} is a leaf")
    current = alive if alive is not None else g_prime
    gone = set(removed)
    small_nodes: Set[int] = set()
    m_small: Set[int] = set()
    for child in h.children(cid):
        if child.is_leaf:
            small_nodes |= child.nodes
            m_small |= {eid for eid in small_forests.get(child.cid, ()) if current.is_alive(eid)}

    plain_order = sorted(small_nodes)
    plain_index = {v: i for i, v in enumerate(plain_order)}
    plain = Graph(len(plain_order))
    for eid in sorted(m_small):
        u, v = g_prime.endpoints(eid)
        plain.add_edge(plain_index[u], plain_index[v], g_prime.weight(eid), eid)

    kind: Dict[int, int] = {}
    own_at: Dict[int, List[int]] = {}
    hanging_edges: List[Tuple[int, int, int]] = []
    super_edges: List[Tuple[int, int, int]] = []
    for eid in sorted(cluster.own):
        if not current.is_alive(eid):
            continue
        u, v = g_prime.endpoints(eid)
        own_at.setdefault(u, []).append(eid)
        own_at.setdefault(v, []).append(eid)
        if u in gone or v in gone:
            kind[eid] = EDGE_MOVED
            continue
        su, sv = super_of.get(u), super_of.get(v)
        if su is None and sv is None:
            kind[eid] = EDGE_PLAIN
            plain.add_edge(plain_index[u], plain_index[v], g_prime.weight(eid), eid)
        elif su is not None and sv is not None:
            if su == sv:
                kind[eid] = EDGE_LOOP
            else:
                kind[eid] = EDGE_SUPER
                super_edges.append((su, sv, eid))
        else:
            kind[eid] = EDGE_HANGING
            if su is None:
                hanging_edges.append((u, sv, eid))  # type: ignore[arg-type]
            else:
                hanging_edges.append((v, su, eid))

    hanging_index: Dict[Tuple[str, int], int] = {}
    for sid in sorted(set(super_of.values())):
        hanging_index[("s", sid)] = len(hanging_index)
    for x, _, _ in hanging_edges:
        hanging_index.setdefault(("v", x), len(hanging_index))
    hanging = Graph(len(hanging_index))
    for x, sid, eid in hanging_edges:
        hanging.add_edge(hanging_index[("v", x)], hanging_index[("s", sid)], g_prime.weight(eid), eid)

    super_count = max(set(super_of.values()), default=-1) + 1
    supers = Graph(super_count)
    for su, sv, eid in super_edges:
        supers.add_edge(su, sv, g_prime.weight(eid), eid)

    result = CompressedCluster(
        cid,
        dict(super_of),
        frozenset(m_small),
        kind,
        plain,
        plain_index,
        hanging,
        hanging_index,
        supers,
        own_at,
    )
    if assert_level() >= 1:
        split = sum(len(result.edges_of(k)) for k in (EDGE_MOVED, EDGE_PLAIN, EDGE_HANGING, EDGE_SUPER, EDGE_LOOP))
        if split != len(kind):
            raise InvariantViolation("own edges not split exactly")
    return result


# -- engine ------------------------------------------------------------------


@dataclass
class _Piece:
    """One initial component of a large child, with its pruner"""

    child: int
    parent: int
    sid: int
    order: List[int]
    index: Dict[int, int]
    pruner: Optional[LasVegasPruner]
    pruned: Set[int] = field(default_factory=set)


@dataclass
class _Compressed:
    view: CompressedCluster
    plain: FewNonTreeMsf
    hanging: SCoveredMsf
    supers: MultigraphMsf


@dataclass(frozen=True)
class Failure:
    """Returned by Engine.delete when the engine failed and may not restart itself"""

    reason: str
    detail: str = ""


@dataclass
class EngineStats:
    deletions: int = 0
    restarts: int = 0
    failures: Dict[str, int] = field(default_factory=dict)
    sketch_inserts_max: int = 0
    sketch_deletes_max: int = 0
    sketch_nontree_max: int = 0
    pruned_nodes: int = 0


STATS_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": [
        "depth",
        "base_case",
        "nodes",
        "edges",
        "deletions",
        "since_build",
        "restarts",
        "failures",
        "churn",
        "sketch",
        "recursion_depth",
    ],
    "properties": {
        "depth": {"type": "integer", "minimum": 0},
        "base_case": {"type": "boolean"},
        "nodes": {"type": "integer", "minimum": 0},
        "edges": {"type": "integer", "minimum": 0},
        "deletions": {"type": "integer", "minimum": 0},
        "since_build": {"type": "integer", "minimum": 0},
        "restarts": {"type": "integer", "minimum": 0},
        "failures": {"type": "object", "additionalProperties": {"type": "integer"}},
        "params": {"type": ["object", "null"]},
        "hierarchy": {
            "type": ["object", "null"],
            "properties": {
                "clusters": {"type": "integer"},
                "leaves": {"type": "integer"},
                "depth": {"type": "integer"},
                "changed": {"type": "integer"},
                "gamma_measured": {"type": "integer"},
                "pieces": {"type": "integer"},
                "super_nodes": {"type": "integer"},
                "own_edges": {"type": "object", "additionalProperties": {"type": "integer"}},
            },
        },
        "churn": {
            "type": "object",
            "required": ["sketch_inserts_max", "sketch_deletes_max"],
            "properties": {
                "sketch_inserts_max": {"type": "integer", "minimum": 0},
                "sketch_deletes_max": {"type": "integer", "minimum": 0},
                "pruned_nodes": {"type": "integer", "minimum": 0},
            },
        },
        "sketch": {
            "type": "object",
            "required": ["edges", "non_tree", "non_tree_max", "bound"],
            "properties": {
                "batch_size": {"type": ["integer", "null"]},
                "edges": {"type": "integer", "minimum": 0},
                "non_tree": {"type": "integer", "minimum": 0},
                "non_tree_max": {"type": "integer", "minimum": 0},
                "bound": {"type": ["integer", "null"]},
            },
        },
        "recursion_depth": {"type": "integer", "minimum": 0},
    },
}


def _rank(g: Graph) -> Graph:
    """Copy of g whose weights are the ranks 1..m of the edge keys"""
    ranked = Graph(g.num_nodes())
    for rank, eid in enumerate(sorted(g.edges(), key=g.key), start=1):
        u, v = g.endpoints(eid)
        ranked.add_edge(u, v, rank, eid)
    return ranked


class Engine:
    """
    Decremental MSF over the MSF hierarchy

    The engine owns its graph (a copy unless copy=False). Deletions are
    routed to the cluster owning the edge; pruners of the enclosing large
    clusters advance, the compressed views and leaf engines update, and
    every edge that may become an MSF edge is handed to the sketch graph,
    whose MSF is the answer.
    """

    def __init__(
        self,
        graph: Graph,
        p: Optional[float] = None,
        depth: int = 0,
        copy: bool = True,
        auto_restart: Optional[bool] = None,
    ):
        """
        Preprocess a graph

        Args:
            graph: Initial graph with comparable weights
            p: Failure probability parameter
            depth: Recursion depth of this engine (0 at the top)
            copy: Work on a private copy of graph
            auto_restart: Rebuild automatically on failure or budget exhaustion
        """
        settings = get_settings().engine
        self.graph = graph.copy() if copy else graph
        self.p = get_settings().few_nontree.failure_p if p is None else p
        self.depth = depth
        self.auto_restart = settings.auto_restart if auto_restart is None else auto_restart
        self.stats_counters = EngineStats()
        self.meter = WorkMeter()
        self._failed: Optional[Failure] = None
        self._injected: Optional[str] = None
        self._build()

    # -- preprocessing ---------------------------------------------------

    def _build(self) -> None:
        settings = get_settings().engine
        reduced, self.mapping = degree_reduce(self.graph)
        ranked = _rank(reduced)
        self.ranked = ranked
        self._since_build = 0
        self._failed = None
        self.params: Optional[EngineParams] = None
        self.hierarchy: Optional[Hierarchy] = None
        self.g_prime: Optional[Graph] = None
        self._base: Optional[MultigraphMsf] = None

        if ranked.num_edges() <= settings.base_threshold or self.depth >= settings.max_depth:
            self._base = MultigraphMsf(ranked, copy=False, meter=self.meter)
            logger.debug("engine_base_case", depth=self.depth, edges=ranked.num_edges())
            return

        n, m = ranked.num_nodes(), ranked.num_edges()
        params = EngineParams.create(n, m, self.p)
        self.params = params
        g_prime, hierarchy = msf_decompose(
            ranked, params.alpha, params.d, params.s_low, params.s_high, params.p
        )
        self.g_prime = g_prime
        self.hierarchy = hierarchy
        child_factory = engine_factory(self.depth + 1)
        nested = sketch_factory(self.depth + 1)

        self._leaf: Dict[int, DecrementalMsf] = {}
        for cluster in hierarchy.leaves():
            local = Graph(len(cluster.nodes))
            order = sorted(cluster.nodes)
            index = {v: i for i, v in enumerate(order)}
            for eid in sorted(cluster.edges):
                u, v = g_prime.endpoints(eid)
                local.add_edge(index[u], index[v], g_prime.weight(eid), eid)
            self._leaf[cluster.cid] = child_factory(local)

        self._pieces: Dict[int, List[_Piece]] = {}
        self._piece_at: Dict[Tuple[int, int], _Piece] = {}
        for cluster in hierarchy.clusters:
            if cluster.is_leaf or cluster.parent is None:
                continue
            self._add_pieces(cluster.cid)

        self._compressed: Dict[int, _Compressed] = {}
        for cluster in hierarchy.clusters:
            if not cluster.is_leaf:
                self._compress(cluster.cid, nested)

        sketch = set(hierarchy.changed)
        for cid, leaf in self._leaf.items():
            sketch |= leaf.forest_edges()
        for state in self._compressed.values():
            sketch |= state.plain.forest_edges()
            sketch |= state.hanging.forest_edges()
            sketch |= state.supers.forest_edges()
        self._sketch_edges: Set[int] = set()
        h_graph = Graph(n)
        for eid in sorted(sketch):
            u, v = ranked.endpoints(eid)
            h_graph.add_edge(u, v, ranked.weight(eid), eid)
            self._sketch_edges.add(eid)
        non_tree = h_graph.num_edges() - len(kruskal(h_graph))
        batch = params.batch_size
        capacity = non_tree + (params.deletion_budget + 1) * batch
        batch = max(batch, 5 * math.ceil(math.log2(max(capacity, 2))))
        capacity = non_tree + (params.deletion_budget + 1) * batch
        self._batch_size = batch
        self._sketch = FewNonTreeMsf(
            h_graph, capacity, batch, factory=nested, failure_p=self.p, copy=False, meter=self.meter
        )
        self.stats_counters.sketch_nontree_max = max(self.stats_counters.sketch_nontree_max, non_tree)

        logger.debug(
            "engine_built",
            depth=self.depth,
            nodes=n,
            edges=m,
            clusters=len(hierarchy.clusters),
            leaves=len(self._leaf),
            pieces=sum(len(p) for p in self._pieces.values()),
            sketch_edges=len(self._sketch_edges),
            sketch_non_tree=non_tree,
            budget=params.deletion_budget,
        )
        if assert_level() >= 2:
            self._cross_check()

    def _add_pieces(self, cid: int) -> None:
        assert self.hierarchy is not None and self.g_prime is not None and self.params is not None
        cluster = self.hierarchy.clusters[cid]
        parent = cluster.parent
        assert parent is not None
        local = Graph(len(cluster.nodes))
        order = sorted(cluster.nodes)
        index = {v: i for i, v in enumerate(order)}
        for eid in sorted(cluster.edges):
            u, v = self.g_prime.endpoints(eid)
            local.add_edge(index[u], index[v], self.g_prime.weight(eid), eid)
        pieces = self._pieces.setdefault(parent, [])
        for component in connected_components(local):
            members = sorted(order[i] for i in component)
            piece_index = {v: i for i, v in enumerate(members)}
            piece_graph = Graph(len(members))
            for i in sorted(component):
                for j, eid in local.incident(i):
                    if i < j:
                        a, b = order[i], order[j]
                        piece_graph.add_edge(
                            piece_index[a], piece_index[b], self.g_prime.weight(eid), eid
                        )
            pruner = None
            if piece_graph.num_edges() > 0:
                alpha0 = self.params.alpha0
                epsilon = math.log(1 / float(alpha0)) / math.log(max(len(members), 3))
                epsilon = min(0.95, max(0.05, epsilon))
                pruner = LasVegasPruner(piece_graph, epsilon, alpha0)
            piece = _Piece(cid, parent, len(pieces), members, piece_index, pruner)
            pieces.append(piece)
            for v in members:
                self._piece_at[(cid, v)] = piece

    def _compress(self, cid: int, nested: DecrementalFactory) -> None:
        assert self.hierarchy is not None and self.g_prime is not None and self.params is not None
        super_of = {
            v: piece.sid
            for piece in self._pieces.get(cid, [])
            for v in piece.order
            if v not in piece.pruned
        }
        forests = {
            child.cid: self._leaf[child.cid].forest_edges()
            for child in self.hierarchy.children(cid)
            if child.is_leaf
        }
        view = compressed_cluster(self.hierarchy, self.g_prime, cid, super_of, forests, alive=self.ranked)
        plain_graph = view.plain_graph
        non_tree = plain_graph.num_edges() - len(kruskal(plain_graph))
        capacity = non_tree + self.params.deletion_budget + 1
        plain = FewNonTreeMsf(
            plain_graph,
            capacity,
            max(1, 5 * math.ceil(math.log2(max(capacity, 2)))),
            factory=nested,
            failure_p=self.p,
            copy=False,
            meter=self.meter,
        )
        hanging = SCoveredMsf(view.hanging_graph, view.covered, copy=False, meter=self.meter)
        supers = MultigraphMsf(view.super_graph, copy=False, meter=self.meter)
        self._compressed[cid] = _Compressed(view, plain, hanging, supers)

    # -- deletion --------------------------------------------------------

    def inject_failure(self, reason: str = "injected") -> None:
        """Make the next deletion fail with `reason`"""
        self._injected = reason

    def restart(self) -> "Engine":
        """Preprocess again on the current graph"""
        self.stats_counters.restarts += 1
        self.meter.charge(self.graph.num_edges())
        logger.info("engine_restart", depth=self.depth, restarts=self.stats_counters.restarts)
        self._build()
        return self

    def delete_between(self, u: int, v: int) -> Union[MsfDelta, Failure]:
        """Delete the alive (u, v) edge with the smallest id"""
        if not (self.graph.has_node(u) and self.graph.has_node(v)):
            raise InputError(f"unknown node in ({u}, {v})")
        matches = sorted(eid for x, eid in self.graph.incident(u) if x == v)
        if not matches:
            raise InputError(f"no alive edge between {u} and {v}")
        return self.delete(matches[0])

    def delete(self, eid: int) -> Union[MsfDelta, Failure]:
        """
        Delete an alive edge

        Returns the change of the forest, or a Failure when the engine
        failed and auto_restart is off; the engine then refuses further
        deletions until restart() is called.
        """
        if self._failed is not None:
            raise StateError(f"engine failed ({self._failed.reason}); restart it first")
        if not self.graph.is_alive(eid):
            raise InputError(f"edge {eid} is not alive")
        if self._base is None and self.params is not None:
            if self._since_build >= self.params.deletion_budget:
                if not self.auto_restart:
                    raise BudgetExhausted(
                        f"deletion budget {self.params.deletion_budget} used up"
                    )
                self.restart()

        before = self.forest_edges()
        self.graph.delete_edge(eid)
        if self._base is None:
            self.ranked.delete_edge(eid)
        self.stats_counters.deletions += 1
        self._since_build += 1
        try:
            if self._injected is not None:
                reason, self._injected = self._injected, None
                raise EngineFailure(reason)
            if self._base is not None:
                delta = self._base.delete(eid)
                delta = MsfDelta(
                    tuple(e for e in delta.removed if not self.mapping.is_gadget(e)),
                    tuple(e for e in delta.added if not self.mapping.is_gadget(e)),
                )
            else:
                delta = self._delete_routed(eid)
        except EngineFailure as failure:
            counts = self.stats_counters.failures
            counts[failure.reason] = counts.get(failure.reason, 0) + 1
            logger.warning("engine_failure", depth=self.depth, reason=failure.reason, detail=failure.detail)
            if not self.auto_restart:
                self._failed = Failure(failure.reason, failure.detail or "")
                return self._failed
            self.restart()
            return forest_delta(before, self.forest_edges())

        if assert_level() >= 2:
            self._cross_check()
        return delta

    def _delete_routed(self, eid: int) -> MsfDelta:
        h = self.hierarchy
        assert h is not None and self.g_prime is not None
        fresh: List[int] = []
        owner = h.owner_of(eid)

        if owner.is_leaf:
            change = self._leaf[owner.cid].delete(eid)
            fresh.extend(change.added)
            if owner.parent is not None:
                fresh.extend(self._small_forest_changed(owner.parent, change))

        for cluster in h.ancestors(owner.cid):
            if cluster.is_leaf or cluster.parent is None:
                continue
            u, _ = self.g_prime.endpoints(eid)
            piece = self._piece_at[(cluster.cid, u)]
            assert piece.pruner is not None
            outcome = piece.pruner.delete(eid)
            self.meter.charge()
            if isinstance(outcome, PruningFailure):
                raise EngineFailure("pruning_failure", outcome.reason)
            if outcome:
                nodes = {piece.order[i] for i in outcome}
                self.meter.charge(len(nodes))
                piece.pruned |= nodes
                self.stats_counters.pruned_nodes += len(nodes)
                fresh.extend(self._nodes_pruned(piece.parent, nodes))

        if not owner.is_leaf:
            state = self._compressed[owner.cid]
            kind = state.view.kind.get(eid)
            if kind is not None and kind != EDGE_MOVED:
                fresh.extend(self._drop_own(state, eid).added)
                state.view.kind[eid] = EDGE_MOVED

        return self._update_sketch(eid, fresh)

    def _drop_own(self, state: _Compressed, eid: int) -> MsfDelta:
        kind = state.view.kind[eid]
        if kind == EDGE_PLAIN:
            return state.plain.delete(eid)
        if kind == EDGE_HANGING:
            return state.hanging.delete(eid)
        if kind == EDGE_SUPER:
            return state.supers.delete(eid)
        return MsfDelta()

    def _small_forest_changed(self, cid: int, change: MsfDelta) -> List[int]:
        """A small child's forest changed; mirror it in the parent's part-1 structure"""
        assert self.g_prime is not None
        state = self._compressed[cid]
        plain = state.plain
        fresh: List[int] = []
        for eid in change.removed:
            if plain.graph.is_alive(eid):
                fresh.extend(plain.delete(eid).added)
        index = state.view.plain_index
        for eid in change.added:
            u, v = self.g_prime.endpoints(eid)
            try:
                delta = plain.insert(index[u], index[v], self.g_prime.weight(eid), eid)
            except CapacityExceeded as exc:
                raise EngineFailure("compressed_capacity", str(exc))
            fresh.extend(delta.added)
        return fresh

    def _nodes_pruned(self, cid: int, nodes: Set[int]) -> List[int]:
        """Move own edges of cluster `cid` touching newly pruned nodes into the sketch"""
        state = self._compressed[cid]
        fresh: List[int] = []
        for x in sorted(nodes):
            state.view.super_of.pop(x, None)
            for eid in state.view.own_at.get(x, ()):
                kind = state.view.kind.get(eid)
                if kind is None or kind == EDGE_MOVED or not self.ranked.is_alive(eid):
                    continue
                fresh.extend(self._drop_own(state, eid).added)
                state.view.kind[eid] = EDGE_MOVED
                fresh.append(eid)
        return fresh

    def _update_sketch(self, eid: int, fresh: Sequence[int]) -> MsfDelta:
        assert self.params is not None
        deletes = 0
        delta = MsfDelta()
        if eid in self._sketch_edges:
            self._sketch_edges.discard(eid)
            delta = self._sketch.delete(eid)
            deletes = 1

        batch: List[Tuple[int, int, Any, int]] = []
        seen: Set[int] = set()
        for f in fresh:
            if f in seen or f in self._sketch_edges or not self.ranked.is_alive(f):
                continue
            seen.add(f)
            u, v = self.ranked.endpoints(f)
            batch.append((u, v, self.ranked.weight(f), f))
        if len(batch) > self._batch_size:
            raise EngineFailure("sketch_batch_overflow", f"{len(batch)} > {self._batch_size}")
        if batch:
            try:
                delta = delta.then(self._sketch.insert_batch(batch))
            except CapacityExceeded as exc:
                raise EngineFailure("sketch_capacity", str(exc))
            self._sketch_edges.update(f for _, _, _, f in batch)

        counters = self.stats_counters
        counters.sketch_inserts_max = max(counters.sketch_inserts_max, len(batch))
        counters.sketch_deletes_max = max(counters.sketch_deletes_max, deletes)
        counters.sketch_nontree_max = max(counters.sketch_nontree_max, self._sketch.non_tree_count())
        return MsfDelta(
            tuple(e for e in delta.removed if not self.mapping.is_gadget(e)),
            tuple(e for e in delta.added if not self.mapping.is_gadget(e)),
        )

    # -- queries ---------------------------------------------------------

    def forest_edges(self) -> FrozenSet[int]:
        if self._base is not None:
            tree = self._base.forest_edges()
        else:
            tree = self._sketch.forest_edges()
        return frozenset(self.mapping.real_edges(tree))

    def _cross_check(self) -> None:
        expected = kruskal(self.graph)
        if self.forest_edges() != expected:
            raise InvariantViolation(f"engine forest diverged from Kruskal at depth {self.depth}")

    def recursion_depth(self) -> int:
        if self._base is not None:
            return self.depth
        nested = [leaf.recursion_depth() for leaf in self._leaf.values() if isinstance(leaf, Engine)]
        return max([self.depth] + nested)

    def _own_edge_kinds(self) -> Dict[str, int]:
        counts = {name: 0 for name in EDGE_KIND_NAMES.values()}
        for state in self._compressed.values():
            for kind in state.view.kind.values():
                counts[EDGE_KIND_NAMES[kind]] += 1
        return counts

    def stats(self) -> Dict[str, Any]:
        """JSON-ready snapshot, validated against STATS_SCHEMA"""
        counters = self.stats_counters
        hierarchy = None
        if self.hierarchy is not None:
            hierarchy = {
                "clusters": len(self.hierarchy.clusters),
                "leaves": len(self.hierarchy.leaves()),
                "depth": self.hierarchy.depth(),
                "changed": len(self.hierarchy.changed),
                "gamma_measured": self.hierarchy.gamma,
                "pieces": sum(len(p) for p in self._pieces.values()),
                "super_nodes": sum(len(s.view.super_nodes) for s in self._compressed.values()),
                "own_edges": self._own_edge_kinds(),
            }
        if self._base is not None:
            sketch = {"edges": 0, "non_tree": 0, "non_tree_max": 0, "bound": None, "batch_size": None}
        else:
            assert self.params is not None
            sketch = {
                "edges": len(self._sketch_edges),
                "non_tree": self._sketch.non_tree_count(),
                "non_tree_max": counters.sketch_nontree_max,
                "bound": self.params.sketch_bound(self.ranked.num_nodes()),
                "batch_size": self._batch_size,
            }
        snapshot = {
            "depth": self.depth,
            "base_case": self._base is not None,
            "nodes": self.graph.num_nodes(),
            "edges": self.graph.num_edges(),
            "deletions": counters.deletions,
            "since_build": self._since_build,
            "restarts": counters.restarts,
            "failures": dict(counters.failures),
            "params": None if self.params is None else self.params.to_dict(),
            "hierarchy": hierarchy,
            "churn": {
                "sketch_inserts_max": counters.sketch_inserts_max,
                "sketch_deletes_max": counters.sketch_deletes_max,
                "pruned_nodes": counters.pruned_nodes,
            },
            "sketch": sketch,
            "recursion_depth": self.recursion_depth(),
        }
        jsonschema.validate(snapshot, STATS_SCHEMA)
        return snapshot


def preprocess(graph: Graph, p: Optional[float] = None) -> Engine:
    return Engine(graph, p=p)


# -- fully dynamic facade ------------------------------------------------------


class DynamicMsf:
    """
    Fully dynamic MSF with batch insertions

    A FewNonTreeMsf over the whole graph whose decremental parts are phase-
    rebuilt engines. When an insertion batch would push the non-tree count
    past k, k is doubled (or raised to what is needed) and the structure is
    rebuilt on the current graph.
    """

    def __init__(
        self,
        graph: Graph,
        k: Optional[int] = None,
        batch_size: Optional[int] = None,
        factory: Optional[DecrementalFactory] = None,
        copy: bool = True,
    ):
        self.graph = graph.copy() if copy else graph
        self.batch_size = batch_size or get_settings().harness.batch_size
        self.meter = WorkMeter()
        non_tree = self.graph.num_edges() - len(kruskal(self.graph))
        self.k = k if k is not None else max(2 * self.batch_size, 2 * non_tree, 1)
        self.k = max(self.k, non_tree, 1)
        self.grows = 0
        self._factory = factory if factory is not None else sketch_factory(0)
        self._build()

    def _build(self) -> None:
        self._few = FewNonTreeMsf(
            self.graph, self.k, self.batch_size, factory=self._factory, copy=False, meter=self.meter
        )

    def forest_edges(self) -> FrozenSet[int]:
        return self._few.forest_edges()

    def delete(self, eid: int) -> MsfDelta:
        return self._few.delete(eid)

    def insert_batch(self, edges: Sequence[Tuple[Any, ...]]) -> MsfDelta:
        try:
            return self._few.insert_batch(edges)
        except CapacityExceeded as exc:
            self.k = max(2 * self.k, exc.needed)
            self.grows += 1
            logger.info("capacity_grown", k=self.k, grows=self.grows)
            self._build()
            return self._few.insert_batch(edges)

    def insert(self, u: int, v: int, w: Any, eid: Optional[int] = None) -> MsfDelta:
        record: Tuple[Any, ...] = (u, v, w) if eid is None else (u, v, w, eid)
        return self.insert_batch([record])

    def get_info(self) -> Dict[str, Any]:
        info = self._few.get_info()
        info["grows"] = self.grows
        return info

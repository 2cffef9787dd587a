#!/usr/bin/env python3
"""
dynmsf - MSF Hierarchical Decomposition
=======================================

Copyright (c) 2026 dynmsf developers.

Splits a bounded-degree weighted graph into a cluster hierarchy in which
the minimum spanning forest of every cluster is assembled from the forests
of its children plus a few of its own edges, for any set of deleted edges.

Features:
- Tree grouping into connected parts of size between s/3 and s
- Pluggable expansion decomposers (exact enumeration, flow-based splitter)
- Partition-respecting expansion decomposition with connected parts
- Level-by-level build with weight bands and exact half-step reweighting
- Property verification report and a plain-text hierarchy dump

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from typing_extensions import Protocol

from .config import get_settings
from .exceptions import InputError, InvariantViolation, OracleScaleError
from .graph_core import (
    Graph,
    WorkMeter,
    connected_components,
    max_degree,
    min_conductance_bruteforce,
    total_volume,
)
from .lbs_cut import LbsInstance, SparseCut, lbs_cut
from .logging_setup import get_logger
from .msf_support import kruskal

logger = get_logger(__name__)

Partition = Tuple[FrozenSet[int], ...]

EXACT_DECOMPOSER_LIMIT = 12
PART_SIZE_RATIO = Fraction(1, 3)


def _sorted_partition(parts: Iterable[Iterable[int]]) -> Partition:
    frozen = [frozenset(p) for p in parts if p]
    return tuple(sorted(frozen, key=min))


def _local_graph(g: Any, nodes: Iterable[int], edges: Iterable[int]) -> Tuple[Graph, List[int]]:
    """Graph on dense ids holding the given edges; returns it with the local->host map"""
    order = sorted(nodes)
    index = {v: i for i, v in enumerate(order)}
    local = Graph(len(order))
    for eid in sorted(edges):
        u, v = g.endpoints(eid)
        local.add_edge(index[u], index[v], g.weight(eid), eid)
    return local, order


# -- tree grouping ---------------------------------------------------------


def frederickson_group(g: Any, tree_edges: Iterable[int], s: int) -> Partition:
    """
    Partition the nodes of a max-degree-3 forest into connected groups

    A tree with at most s nodes forms a single group. Larger trees are
    rooted at a node of degree at most two and cut bottom-up: a node's
    remnant is itself plus its children's uncut remnants, and it is cut off
    once it reaches ceil(s/3) nodes. A short remnant left at the root joins
    an adjacent group. All groups have between ceil(s/3) and s nodes except
    trees that are smaller than ceil(s/3) to begin with.
    """
    if s < 1:
        raise InputError("group size s must be positive")
    adj: Dict[int, List[int]] = {v: [] for v in g.nodes()}
    for eid in tree_edges:
        u, v = g.endpoints(eid)
        adj[u].append(v)
        adj[v].append(u)
    for v, nbrs in adj.items():
        if len(nbrs) > 3:
            raise InputError(f"tree node {v} has degree {len(nbrs)} > 3")

    lower = math.ceil(s / 3)
    parts: List[Set[int]] = []
    seen: Set[int] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        component = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    component.append(y)
                    queue.append(y)
        if len(component) <= s:
            parts.append(set(component))
            continue

        root = min(v for v in component if len(adj[v]) <= 2)
        parent: Dict[int, Optional[int]] = {root: None}
        order = [root]
        for x in order:
            for y in adj[x]:
                if y not in parent:
                    parent[y] = x
                    order.append(y)

        remnant: Dict[int, Set[int]] = {}
        part_of: Dict[int, int] = {}
        for x in reversed(order):
            group = {x}
            for y in adj[x]:
                if parent.get(y) == x and y in remnant:
                    group |= remnant.pop(y)
            if len(group) >= lower:
                for v in group:
                    part_of[v] = len(parts)
                parts.append(group)
            else:
                remnant[x] = group

        leftover = remnant.pop(root, None)
        if leftover:
            host = next(
                part_of[y] for x in sorted(leftover) for y in adj[x] if y in part_of
            )
            parts[host] |= leftover

    return _sorted_partition(parts)


# -- expansion decomposers -------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Partition returned by an expansion decomposer with its crossing count"""

    parts: Partition
    crossing: int
    gamma: int


def crossing_edges(g: Any, parts: Sequence[Iterable[int]]) -> List[int]:
    where: Dict[int, int] = {}
    for i, part in enumerate(parts):
        for v in part:
            where[v] = i
    crossing = []
    for eid in g.edges():
        u, v = g.endpoints(eid)
        if where[u] != where[v]:
            crossing.append(eid)
    return crossing


def measured_gamma(crossing: int, alpha: Fraction, n: int) -> int:
    """Smallest integer gamma with crossing <= alpha * gamma * n"""
    if crossing == 0 or alpha <= 0 or n == 0:
        return 1
    return max(1, math.ceil(Fraction(crossing) / (alpha * n)))


class ExpansionDecomposer(Protocol):
    name: str

    def __call__(self, g: Graph, alpha: Fraction, p: float = 0.01) -> Decomposition: ...


class _SplittingDecomposer:
    """Repeatedly splits parts along sparse cuts until none is found"""

    name = "splitting"

    def __init__(self) -> None:
        self.meter = WorkMeter()

    def _split(self, view: Graph, alpha: Fraction) -> Optional[FrozenSet[int]]:
        raise NotImplementedError

    def __call__(self, g: Graph, alpha: Fraction, p: float = 0.01) -> Decomposition:
        alpha_q = Fraction(alpha)
        pending = [frozenset(c) for c in connected_components(g)]
        parts: List[FrozenSet[int]] = []
        while pending:
            members = pending.pop()
            if len(members) < 2:
                parts.append(members)
                continue
            view, order = _local_graph(
                g,
                members,
                {eid for v in members for u, eid in g.incident(v) if u in members},
            )
            side = self._split(view, alpha_q)
            if side is None:
                parts.append(members)
                continue
            inside = frozenset(order[i] for i in side)
            for chunk in (inside, members - inside):
                sub, sub_order = _local_graph(
                    g, chunk, {eid for v in chunk for u, eid in g.incident(v) if u in chunk}
                )
                pending.extend(
                    frozenset(sub_order[i] for i in comp) for comp in connected_components(sub)
                )
        result = _sorted_partition(parts)
        crossing = len(crossing_edges(g, result))
        return Decomposition(result, crossing, measured_gamma(crossing, alpha_q, g.num_nodes()))


class ExactExpansionDecomposer(_SplittingDecomposer):
    """Recursive minimum-conductance splitting by enumeration; small graphs only"""

    name = "exact"

    def __init__(self, cap: Optional[int] = None):
        super().__init__()
        self.cap = get_settings().oracle.property8_cap if cap is None else cap

    def _split(self, view: Graph, alpha: Fraction) -> Optional[FrozenSet[int]]:
        if total_volume(view) == 0:
            return None
        try:
            cut, phi = min_conductance_bruteforce(view, self.cap)
        except OracleScaleError:
            raise
        except InputError:
            return None
        self.meter.charge(1 << max(0, view.num_nodes() - 1))
        return cut.members if phi < alpha else None


class FlowExpansionDecomposer(_SplittingDecomposer):
    """
    Heuristic splitter built on locally balanced sparse cuts

    Small parts go to exact enumeration. Larger ones grow a BFS ball around
    a few well-spread seeds and ask lbs_cut for a sparse cut overlapping
    the ball; the part stays whole when no seed yields a cut below alpha.
    """

    name = "flow"

    def __init__(self, seeds: int = 4, exact_limit: int = EXACT_DECOMPOSER_LIMIT):
        super().__init__()
        self.seeds = seeds
        self.exact = ExactExpansionDecomposer(cap=exact_limit)
        self.exact_limit = exact_limit

    def _seed_nodes(self, view: Graph) -> List[int]:
        seeds = [max(view.nodes(), key=lambda v: (view.degree(v), -v))]
        while len(seeds) < min(self.seeds, view.num_nodes()):
            dist = {s: 0 for s in seeds}
            queue = deque(seeds)
            last = seeds[-1]
            while queue:
                last = queue.popleft()
                for u, _ in view.incident(last):
                    if u not in dist:
                        dist[u] = dist[last] + 1
                        queue.append(u)
            if last in seeds:
                break
            seeds.append(last)
        return seeds

    def _ball(self, view: Graph, seed: int, budget: int) -> Set[int]:
        ball = {seed}
        vol = view.degree(seed)
        queue = deque([seed])
        while queue:
            x = queue.popleft()
            for u, _ in view.incident(x):
                if u in ball or vol + view.degree(u) > budget:
                    continue
                ball.add(u)
                vol += view.degree(u)
                queue.append(u)
        return ball

    def _split(self, view: Graph, alpha: Fraction) -> Optional[FrozenSet[int]]:
        if view.num_nodes() <= self.exact_limit:
            return self.exact._split(view, alpha)
        total = total_volume(view)
        if total == 0:
            return None
        for seed in self._seed_nodes(view):
            ball = self._ball(view, seed, max(view.degree(seed), total // 8))
            vol_ball = sum(view.degree(v) for v in ball)
            rest = total - vol_ball
            if vol_ball == 0 or 2 * vol_ball > rest:
                continue
            sigma = max(Fraction(2 * vol_ball, rest), Fraction(1, 2))
            outcome = lbs_cut(LbsInstance.create(view, ball, sigma, alpha), self.meter)
            if isinstance(outcome, SparseCut) and outcome.conductance < alpha:
                return outcome.cut.members
        return None


def default_decomposer() -> ExpansionDecomposer:
    return FlowExpansionDecomposer()


# -- partition-respecting decomposition ------------------------------------------


@dataclass(frozen=True)
class RespectingDecomposition:
    parts: Partition
    crossing: int
    gamma: int
    inner_alpha: Fraction


def _check_partition(nodes: Set[int], parts: Sequence[FrozenSet[int]]) -> None:
    covered: Set[int] = set()
    for part in parts:
        if covered & part:
            raise InputError("partition parts overlap")
        covered |= part
    if covered != nodes:
        raise InputError("partition does not cover the node set")


def expansion_decompose_respecting(
    g: Graph,
    partition: Sequence[Iterable[int]],
    alpha: Any,
    p: float = 0.01,
    decomposer: Optional[ExpansionDecomposer] = None,
    s: Optional[int] = None,
) -> RespectingDecomposition:
    """
    Expansion decomposition whose parts are unions of the given parts

    Every given part is contracted to one node, the inner decomposer runs on
    the contracted multigraph with parameter s·alpha/3, and the result is
    expanded back. Output parts that are disconnected in g are split into
    their components.

    Args:
        g: Graph with maximum degree 3
        partition: Connected parts of at most s nodes
        alpha: Conductance parameter
        p: Failure probability handed to the inner decomposer
        decomposer: Inner decomposer (default: flow-based)
        s: Part size bound; defaults to the largest part
    """
    alpha_q = Fraction(alpha)
    if not 0 <= alpha_q <= 1:
        raise InputError(f"alpha {alpha_q} outside [0, 1]")
    parts = [frozenset(part) for part in partition]
    nodes = set(g.nodes())
    _check_partition(nodes, parts)
    bound = max((len(part) for part in parts), default=1) if s is None else s
    components = {frozenset(c) for c in connected_components(g)}
    where: Dict[int, int] = {}
    for i, part in enumerate(parts):
        if len(part) > bound:
            raise InputError(f"part of {len(part)} nodes exceeds s = {bound}")
        if len(part) < math.ceil(PART_SIZE_RATIO * bound) and part not in components:
            raise InputError(f"part of {len(part)} nodes is below s/3 = {bound / 3:.1f}")
        for v in part:
            where[v] = i
    for part in parts:
        sub, _ = _local_graph(
            g, part, {eid for v in part for u, eid in g.incident(v) if u in part}
        )
        if sub.num_nodes() > 1 and len(connected_components(sub)) != 1:
            raise InputError(f"part containing node {min(part)} is not connected")

    contracted = Graph(len(parts))
    for eid in g.edges():
        u, v = g.endpoints(eid)
        if where[u] != where[v]:
            contracted.add_edge(where[u], where[v], 1, eid)

    inner_alpha = min(Fraction(1), PART_SIZE_RATIO * bound * alpha_q)
    inner = (decomposer or default_decomposer())(contracted, inner_alpha, p)

    expanded: List[FrozenSet[int]] = []
    for group in inner.parts:
        members = frozenset().union(*(parts[i] for i in group))
        sub, order = _local_graph(
            g, members, {eid for v in members for u, eid in g.incident(v) if u in members}
        )
        for comp in connected_components(sub):
            expanded.append(frozenset(order[i] for i in comp))
    result = _sorted_partition(expanded)
    crossing = len(crossing_edges(g, result))
    return RespectingDecomposition(
        result, crossing, measured_gamma(crossing, alpha_q, g.num_nodes()), inner_alpha
    )


# -- hierarchy -------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionParams:
    alpha: Fraction
    d: int
    s_low: int
    s_high: int
    p: float = 0.01

    @property
    def bands(self) -> int:
        return self.d - 2


@dataclass
class Cluster:
    cid: int
    level: int
    parent: Optional[int]
    nodes: FrozenSet[int]
    edges: FrozenSet[int]
    own: FrozenSet[int] = frozenset()
    band_own: FrozenSet[int] = frozenset()
    children: List[int] = field(default_factory=list)
    is_leaf: bool = False


@dataclass
class Hierarchy:
    """
    Cluster tree over a reweighted graph

    `clusters[0]` is the root. `reweighted` carries the new weights w', and
    `changed` lists the edges whose weight was raised.
    """

    clusters: List[Cluster]
    reweighted: Graph
    changed: FrozenSet[int]
    m_partition: Partition
    params: DecompositionParams
    gamma: int = 1
    level_crossing: Dict[int, int] = field(default_factory=dict)
    owner: Dict[int, int] = field(default_factory=dict)

    @property
    def root(self) -> Cluster:
        return self.clusters[0]

    def depth(self) -> int:
        return max(c.level for c in self.clusters)

    def leaves(self) -> List[Cluster]:
        return [c for c in self.clusters if c.is_leaf]

    def children(self, cid: int) -> List[Cluster]:
        return [self.clusters[i] for i in self.clusters[cid].children]

    def ancestors(self, cid: int) -> List[Cluster]:
        """The cluster itself followed by its ancestors up to the root"""
        chain = []
        current: Optional[int] = cid
        while current is not None:
            chain.append(self.clusters[current])
            current = self.clusters[current].parent
        return chain

    def owner_of(self, eid: int) -> Cluster:
        return self.clusters[self.owner[eid]]


def band_index(w: int, m: int, bands: int) -> int:
    """Band i with w in (m - i·m/bands, m - (i-1)·m/bands]"""
    return (bands * (m - w)) // m + 1


def raised_weight(level: int, m: int, bands: int) -> Fraction:
    """floor(m - level·m/bands) + 1/2"""
    return Fraction(2 * ((m * (bands - level)) // bands) + 1, 2)


def _check_weights(g: Graph) -> int:
    m = g.num_edges()
    weights = sorted(g.weight(eid) for eid in g.edges())
    if weights != list(range(1, m + 1)):
        raise InputError("weights must be a permutation of 1..m")
    return m


def msf_decompose(
    g: Graph,
    alpha: Any,
    d: int,
    s_low: int,
    s_high: int,
    p: float = 0.01,
    decomposer: Optional[ExpansionDecomposer] = None,
) -> Tuple[Graph, Hierarchy]:
    """
    Build the MSF hierarchy and the reweighted graph

    Disconnected graphs are accepted; clusters then follow the components.

    Args:
        g: Graph with maximum degree 3 and weights a permutation of 1..m
        alpha: Conductance parameter in [0, 1]
        d: Depth bound, at least 3
        s_low: Group size for the MSF grouping
        s_high: Leaf threshold on edge counts, at least s_low
        p: Failure probability handed to the expansion decomposer
        decomposer: Inner expansion decomposer
    """
    alpha_q = Fraction(alpha)
    if not 0 <= alpha_q <= 1:
        raise InputError(f"alpha {alpha_q} outside [0, 1]")
    if d < 3:
        raise InputError(f"depth bound d = {d} must be at least 3")
    if s_low < 1 or s_high < s_low:
        raise InputError(f"need 1 <= s_low <= s_high, got {s_low}, {s_high}")
    if max_degree(g) > 3:
        raise InputError(f"maximum degree {max_degree(g)} exceeds 3")
    m = _check_weights(g)
    params = DecompositionParams(alpha_q, d, s_low, s_high, p)
    inner = decomposer or default_decomposer()

    msf = kruskal(g)
    m_parts = frederickson_group(g, msf, s_low)
    part_of = {v: i for i, part in enumerate(m_parts) for v in part}
    m_cluster_edges = frozenset(
        eid for eid in msf if part_of[g.endpoints(eid)[0]] == part_of[g.endpoints(eid)[1]]
    )
    band = {
        eid: band_index(g.weight(eid), m, params.bands)
        for eid in g.edges()
        if eid not in m_cluster_edges
    }

    raised: Dict[int, Fraction] = {}
    clusters: List[Cluster] = []
    level_crossing: Dict[int, int] = {}
    owner: Dict[int, int] = {}

    root = Cluster(0, 1, None, frozenset(g.nodes()), frozenset(g.edges()))
    clusters.append(root)
    stack = [0]
    while stack:
        cluster = clusters[stack.pop()]
        level = cluster.level
        if len(cluster.edges) <= s_high:
            cluster.is_leaf = True
            cluster.own = cluster.edges
            for eid in cluster.own:
                owner[eid] = cluster.cid
            continue
        if level >= d:
            raise InvariantViolation(f"non-leaf cluster at level {level} reaches depth bound {d}")

        local, order = _local_graph(g, cluster.nodes, cluster.edges)
        index = {v: i for i, v in enumerate(order)}
        local_parts = [
            frozenset(index[v] for v in part)
            for part in m_parts
            if next(iter(part)) in cluster.nodes
        ]
        result = expansion_decompose_respecting(
            local, local_parts, alpha_q, p, inner, s=s_low
        )
        level_crossing[level] = level_crossing.get(level, 0) + result.crossing

        child_of: Dict[int, int] = {}
        child_ids: List[int] = []
        for part in result.parts:
            members = frozenset(order[i] for i in part)
            child = Cluster(len(clusters), level + 1, cluster.cid, members, frozenset())
            clusters.append(child)
            child_ids.append(child.cid)
            for v in members:
                child_of[v] = child.cid

        kept: Dict[int, Set[int]] = {cid: set() for cid in child_ids}
        own: Set[int] = set()
        band_own: Set[int] = set()
        threshold = raised_weight(level, m, params.bands)
        for eid in cluster.edges:
            u, v = g.endpoints(eid)
            if child_of[u] == child_of[v] and band.get(eid) != level:
                kept[child_of[u]].add(eid)
                continue
            own.add(eid)
            owner[eid] = cluster.cid
            if child_of[u] == child_of[v]:
                band_own.add(eid)
            if g.weight(eid) < threshold:
                raised[eid] = threshold
        for cid in child_ids:
            clusters[cid].edges = frozenset(kept[cid])
        cluster.own = frozenset(own)
        cluster.band_own = frozenset(band_own)
        cluster.children = child_ids
        stack.extend(reversed(child_ids))

    changed = frozenset(raised)
    reweighted = Graph(g.num_nodes())
    for eid in sorted(g.edges()):
        u, v = g.endpoints(eid)
        reweighted.add_edge(u, v, raised.get(eid, g.weight(eid)), eid)

    gamma = max(
        [measured_gamma(count, alpha_q, g.num_nodes()) for count in level_crossing.values()]
        or [1]
    )
    hierarchy = Hierarchy(
        clusters,
        reweighted,
        changed,
        m_parts,
        params,
        gamma=gamma,
        level_crossing=level_crossing,
        owner=owner,
    )
    logger.debug(
        "msf_decomposed",
        nodes=g.num_nodes(),
        edges=m,
        clusters=len(clusters),
        leaves=len(hierarchy.leaves()),
        depth=hierarchy.depth(),
        changed=len(changed),
        gamma=gamma,
        decomposer=getattr(inner, "name", type(inner).__name__),
    )
    return reweighted, hierarchy


# -- verification ------------------------------------------------------------


@dataclass
class HierarchyReport:
    """Status per property: "pass", "fail", "unchecked" or "reported" """

    status: Dict[int, str] = field(default_factory=dict)
    details: Dict[int, str] = field(default_factory=dict)
    min_conductance: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return all(s != "fail" for s in self.status.values())

    def record(self, prop: int, passed: bool, detail: str = "") -> None:
        self.status[prop] = "pass" if passed else "fail"
        if detail:
            self.details[prop] = detail

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "status": {str(k): v for k, v in sorted(self.status.items())},
            "details": {str(k): v for k, v in sorted(self.details.items())},
            "min_conductance": None
            if self.min_conductance is None
            else str(self.min_conductance),
        }


def _msf_without(g: Graph, edges: Iterable[int], deleted: Set[int]) -> FrozenSet[int]:
    return kruskal(g, [eid for eid in edges if eid not in deleted])


def verify_hierarchy(
    g: Graph,
    g_prime: Graph,
    h: Hierarchy,
    deletion_samples: int = 20,
    seed: int = 0,
) -> HierarchyReport:
    """Check the eight hierarchy properties; conductance is only reported"""
    report = HierarchyReport()
    params = h.params
    n = g.num_nodes()
    m = g.num_edges()

    lowered = [eid for eid in g.edges() if g_prime.weight(eid) < g.weight(eid)]
    report.record(1, not lowered, f"lowered edges: {lowered[:5]}" if lowered else "")

    changed = {eid for eid in g.edges() if g_prime.weight(eid) != g.weight(eid)}
    bound2 = params.alpha * params.d * h.gamma * n
    report.record(
        2,
        len(changed) <= bound2 and changed == set(h.changed),
        f"|E!=| = {len(changed)}, bound {bound2}",
    )

    rng = random.Random(seed)
    edges = sorted(g.edges())
    failures = []
    for sample in range(deletion_samples):
        size = rng.randint(0, max(0, len(edges) // 2))
        deleted = set(rng.sample(edges, size))
        for cluster in h.clusters:
            if cluster.is_leaf:
                continue
            whole = _msf_without(g_prime, cluster.edges, deleted)
            union: Set[int] = set()
            for child in h.children(cluster.cid):
                union |= _msf_without(g_prime, child.edges, deleted)
            if not union <= whole or not whole - union <= cluster.own:
                failures.append((sample, cluster.cid))
    report.record(
        3, not failures, f"violations (sample, cluster): {failures[:5]}" if failures else ""
    )

    report.record(4, h.depth() <= params.d, f"depth {h.depth()}, bound {params.d}")

    wrong_leaf = [c.cid for c in h.clusters if c.is_leaf != (len(c.edges) <= params.s_high)]
    report.record(5, not wrong_leaf, f"clusters: {wrong_leaf[:5]}" if wrong_leaf else "")

    small = [c.cid for c in h.leaves() if 3 * len(c.nodes) < params.s_low]
    report.record(6, not small, f"small leaves: {small[:5]}" if small else "")

    per_level: Dict[int, int] = {}
    for c in h.clusters:
        if not c.is_leaf:
            per_level[c.level] = per_level.get(c.level, 0) + len(c.own)
    bound7 = math.ceil(Fraction(m, params.bands)) + params.alpha * h.gamma * n
    heavy = {lvl: cnt for lvl, cnt in per_level.items() if cnt > bound7}
    report.record(7, not heavy, f"levels over {bound7}: {heavy}" if heavy else "")

    cap = get_settings().oracle.property8_cap
    lowest: Optional[Fraction] = None
    checked = 0
    for c in h.clusters:
        if c.parent is None or not 2 <= len(c.nodes) <= cap:
            continue
        local, _ = _local_graph(g, c.nodes, c.edges)
        if total_volume(local) == 0:
            continue
        try:
            _, phi = min_conductance_bruteforce(local, cap)
        except InputError:
            continue
        checked += 1
        lowest = phi if lowest is None else min(lowest, phi)
    report.min_conductance = lowest
    report.status[8] = "reported" if checked else "unchecked"
    report.details[8] = f"{checked} clusters enumerated, min conductance {lowest}"
    return report


def dump_hierarchy(h: Hierarchy) -> str:
    """One line per cluster: level parent |V| |E| |E^C| leaf"""
    rows = []
    for c in h.clusters:
        parent = -1 if c.parent is None else c.parent
        rows.append(
            f"{c.level} {parent} {len(c.nodes)} {len(c.edges)} {len(c.own)} "
            f"{1 if c.is_leaf else 0}"
        )
    return "\n".join(rows) + "\n"

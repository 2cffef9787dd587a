#!/usr/bin/env python3
"""
dynmsf - Expander Pruning
=========================

Copyright (c) 2026 dynmsf developers.

Keeps a large piece of an expander well connected while its edges are
deleted one at a time.

Features:
- One-shot pruning: a single batch of deletions, resumable in work budgets
- Exact sparse-cut peeling for graphs within the oracle size cap
- Recursive locally balanced sparse cut decomposition for larger graphs
- Deletion batches outside the guaranteed regime: rejected, or run without a guarantee
- DynamicPruner: multi-level schedule spreading the one-shot work over time
- LasVegasPruner: incremental connectivity self-check reporting failure instead of lying

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Deque, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple, Union

from .config import get_settings
from .exceptions import InputError, InvariantViolation, StateError, WorkLimitExceeded
from .flow import unit_flow_height
from .graph_core import (
    Graph,
    Subgraph,
    WorkMeter,
    connected_components,
    max_degree,
    min_conductance_bruteforce,
    volume,
)
from .lbs_cut import LbsInstance, NoSparseOverlappingCut, lbs_cut
from .logging_setup import get_logger
from .msf_support import UnionFind

logger = get_logger(__name__)

RatioLike = Union[Fraction, int, str]

# published constant of the deletion budget |D| < alpha^2 m / (REGIME_DIVISOR * max degree)
REGIME_DIVISOR = 30

PATH_TRIVIAL = "trivial"
PATH_EXACT = "exact"
PATH_RECURSIVE = "recursive"


def c_con_bound(sigma: Fraction) -> Fraction:
    """Worst congestion factor lbs_cut can report for overlap sigma and alpha <= 1/5"""
    return Fraction(24, 5) * (math.ceil(1 / sigma) + 1) / sigma


def c_size_bound(sigma: Fraction) -> Fraction:
    return Fraction(2 * math.ceil(1 / sigma)) / sigma


def level_count(num_deleted: int, alpha_b: Fraction, epsilon: float) -> int:
    """First level whose size threshold drops to one"""
    s1 = float(2 * num_deleted / alpha_b + 1)
    level = 1
    while s1 ** (1 - (level - 1) * epsilon) > 1 + 1e-12:
        level += 1
    return level


def recursive_guarantee(alpha_b: Fraction, levels: int) -> Fraction:
    """Conductance published by the recursive path: alpha_b / (5 c_con^(L-1))"""
    return alpha_b / (5 * c_con_bound(alpha_b / 2) ** (levels - 1))


def exact_guarantee(alpha_b: Fraction) -> Fraction:
    return alpha_b / 10


def worst_level_count(epsilon: float) -> int:
    return math.ceil(1 / epsilon) + 1


def regime_capacity(alpha_b: Fraction, num_edges: int, max_degree: int) -> int:
    """Largest deletion count x with x * REGIME_DIVISOR * max_degree < alpha_b^2 * num_edges"""
    if max_degree <= 0:
        return 0
    room = Fraction(alpha_b) ** 2 * num_edges / (REGIME_DIVISOR * max_degree)
    return max(0, math.ceil(room) - 1)


@dataclass(frozen=True)
class OneShotConfig:
    """Derived constants for one pruning computation"""

    alpha_b: Fraction
    epsilon: float
    sigma: Fraction
    levels: int
    size_thresholds: Tuple[float, ...]
    level_alphas: Tuple[Fraction, ...]
    c_con: Fraction
    c_size: Fraction
    max_degree: int
    num_deleted: int
    num_edges: int
    in_regime: bool
    time_limit: int

    @classmethod
    def create(
        cls,
        alpha_b: Fraction,
        epsilon: float,
        num_deleted: int,
        max_degree: int,
        num_edges: int,
        factor: int,
    ) -> "OneShotConfig":
        sigma = alpha_b / 2
        levels = level_count(num_deleted, alpha_b, epsilon)
        s1 = float(2 * num_deleted / alpha_b + 1)
        thresholds = tuple(s1 ** (1 - i * epsilon) for i in range(levels + 1))
        c_con = c_con_bound(sigma)
        c_size = c_size_bound(sigma)
        # level_alphas[i] is the sparsity used at level i + 1
        alphas = tuple(alpha_b / (5 * c_con**i) for i in range(levels))
        in_regime = num_deleted <= regime_capacity(alpha_b, num_edges, max_degree)
        smallest = alphas[-2] if levels >= 2 else alphas[0]
        height = unit_flow_height(math.ceil(1 / smallest), max(num_edges, 1))
        flow_cost = (
            height
            * (math.ceil(1 / sigma) + 1) ** 2
            * max(max_degree, 1)
            * (4 * max(max_degree, 1) * num_deleted / alpha_b + 1)
        )
        time_limit = factor * math.ceil(levels * c_size * s1**epsilon * flow_cost) + factor
        return cls(
            alpha_b=alpha_b,
            epsilon=epsilon,
            sigma=sigma,
            levels=levels,
            size_thresholds=thresholds,
            level_alphas=alphas,
            c_con=c_con,
            c_size=c_size,
            max_degree=max_degree,
            num_deleted=num_deleted,
            num_edges=num_edges,
            in_regime=in_regime,
            time_limit=time_limit,
        )


@dataclass(frozen=True)
class Pruned:
    """
    Nodes to prune, plus the conductance the remainder is guaranteed to have
    whenever the graph before the deletions was an alpha_b-expander

    `alpha` is None for a deletion batch outside the regime: the remainder
    is then only known to be connected. `stopped` names the check that cut
    such a run short.
    """

    nodes: FrozenSet[int]
    alpha: Optional[Fraction]
    volume: int
    path: str
    trail: Tuple[FrozenSet[int], ...] = ()
    work: int = 0
    stopped: Optional[str] = None

    @property
    def guaranteed(self) -> bool:
        return self.alpha is not None


@dataclass(frozen=True)
class LowConductance:
    """Certificate that the graph before the deletions had conductance below alpha_b"""

    reason: str
    work: int = 0


OneShotResult = Union[Pruned, LowConductance]


def _edge_visible(g: Any, eid: int) -> bool:
    if isinstance(g, Subgraph):
        return g.is_visible(eid)
    return bool(g.is_alive(eid))


def _view(g: Any, nodes: Iterable[int]) -> Subgraph:
    if isinstance(g, Subgraph):
        return Subgraph(g.host, nodes, g.time)
    return Subgraph(g, nodes)


def _graph_before(g: Any, deleted: Iterable[int]) -> Tuple[Graph, List[int]]:
    """Standalone copy of g with the deleted edges put back"""
    if isinstance(g, Subgraph):
        local, order = g.materialize()
    else:
        local, order = _view(g, g.nodes()).materialize()
    index = {v: i for i, v in enumerate(order)}
    for eid in deleted:
        u, v = g.endpoints(eid)
        local.add_edge(index[u], index[v], g.weight(eid), eid)
    return local, order


class OneShotComputation:
    """
    Resumable one-shot pruning of graph g after deleting the edge set D

    The graph g is the state after the deletions; D holds ids of edges that
    are no longer visible in g but whose endpoints are nodes of g. The work
    advances through step(budget), one atomic action (a sparse cut call or
    a peel) at a time, so a single step may overshoot its budget by at most
    one action. Once the work limit is passed the computation finishes in
    the same step.

    Above the exact cap a batch larger than regime_capacity() carries no
    guarantee: strict computations reject it, the others run the recursion
    anyway and publish a connected remainder without a conductance bound.
    """

    def __init__(
        self,
        graph: Any,
        deleted: Iterable[int],
        alpha_b: RatioLike,
        epsilon: float,
        exact_cap: Optional[int] = None,
        strict: bool = False,
    ):
        """
        Initialize a pruning computation

        Args:
            graph: Graph or view after the deletions
            deleted: Ids of the deleted edges
            alpha_b: Conductance the graph had before the deletions, in (0, 1]
            epsilon: Level trade-off in (0, 1]
            exact_cap: Largest node count handled by exact peeling
            strict: Raise InputError for a recursive batch outside the regime
        """
        settings = get_settings()
        self.graph = graph
        self.alpha_b = Fraction(alpha_b)
        if not 0 < self.alpha_b <= 1:
            raise InputError(f"alpha_b {self.alpha_b} outside (0, 1]")
        if not 0 < epsilon <= 1:
            raise InputError(f"epsilon {epsilon} outside (0, 1]")
        self.epsilon = epsilon
        self.deleted = tuple(sorted(set(deleted)))
        self.exact_cap = settings.oracle.exact_prune_cap if exact_cap is None else exact_cap

        extra: Dict[int, int] = {}
        for eid in self.deleted:
            u, v = graph.endpoints(eid)
            if not (graph.has_node(u) and graph.has_node(v)):
                raise InputError(f"deleted edge {eid} leaves the graph")
            if _edge_visible(graph, eid):
                raise InputError(f"edge {eid} is still present")
            extra[u] = extra.get(u, 0) + 1
            extra[v] = extra.get(v, 0) + 1

        self.num_nodes = graph.num_nodes()
        degree_before = max(
            (graph.degree(v) + extra.get(v, 0) for v in graph.nodes()), default=0
        )
        self.config = OneShotConfig.create(
            self.alpha_b,
            epsilon,
            len(self.deleted),
            degree_before,
            graph.num_edges() + len(self.deleted),
            settings.pruning.time_limit_factor,
        )
        if not self.deleted:
            self.path = PATH_TRIVIAL
            limit: Optional[int] = None
        elif self.num_nodes <= self.exact_cap:
            self.path = PATH_EXACT
            limit = self.num_nodes * (1 << self.num_nodes)
        else:
            self.path = PATH_RECURSIVE
            limit = self.config.time_limit
        self.guaranteed = self.path != PATH_RECURSIVE or self.config.in_regime
        if not self.guaranteed and strict:
            raise InputError(
                f"{len(self.deleted)} deletions exceed the regime capacity "
                f"{regime_capacity(self.alpha_b, self.config.num_edges, degree_before)} "
                f"for alpha_b {self.alpha_b}"
            )
        self.meter = WorkMeter(limit)
        self.result: Optional[OneShotResult] = None
        self.stopped: Optional[str] = None
        self.trail: List[FrozenSet[int]] = []
        self._removed: Set[int] = set()
        self._actions = self._run()

    @property
    def done(self) -> bool:
        return self.result is not None

    @property
    def time_limit(self) -> Optional[int]:
        return self.meter.limit

    @property
    def work_estimate(self) -> int:
        """Work the computation may spend before it is forced to finish"""
        return self.meter.limit if self.meter.limit is not None else self.num_nodes + 1

    def step(self, budget: Optional[int] = None) -> bool:
        """Advance by roughly `budget` work units (all of it when None); True once finished"""
        start = self.meter.units
        while self.result is None:
            if (
                budget is not None
                and self.meter.units - start >= budget
                and not self.meter.exceeded()
            ):
                break
            try:
                next(self._actions)
            except StopIteration:
                break
        return self.result is not None

    def run(self) -> OneShotResult:
        self.step(None)
        assert self.result is not None
        return self.result

    # -- phases ------------------------------------------------------------

    def _run(self) -> Iterator[None]:
        try:
            if self.path == PATH_EXACT:
                yield from self._checked(self._exact())
            elif self.path == PATH_RECURSIVE:
                yield from self._checked(self._recursive())
        except WorkLimitExceeded as exc:
            logger.info("prune_time_limit", units=exc.units, limit=exc.limit, path=self.path)
            if self.guaranteed:
                self.result = LowConductance("time_limit", self.meter.units)
                return
            self.stopped = "time_limit"
        if self.result is None and self.path != PATH_TRIVIAL:
            yield from self._peel_components()
            self._check_volume()
        if self.result is None:
            self._publish()

    def _checked(self, actions: Iterator[None]) -> Iterator[None]:
        for _ in actions:
            if self.meter.exceeded():
                raise WorkLimitExceeded(self.meter.units, self.meter.limit or 0)
            yield

    def _remaining(self) -> Subgraph:
        return _view(self.graph, (v for v in self.graph.nodes() if v not in self._removed))

    def _peel(self, nodes: Iterable[int]) -> None:
        peeled = frozenset(nodes)
        self._removed |= peeled
        self.trail.append(peeled)
        logger.debug("prune_peel", size=len(peeled), path=self.path)

    def _exact(self) -> Iterator[None]:
        threshold = exact_guarantee(self.alpha_b)
        while True:
            h = self._remaining()
            n = h.num_nodes()
            if n < 2:
                return
            self.meter.charge(1 << (n - 1))
            if self.meter.exceeded():
                raise WorkLimitExceeded(self.meter.units, self.meter.limit or 0)
            try:
                cut, phi = min_conductance_bruteforce(h, cap=self.exact_cap)
            except InputError:
                return
            if phi >= threshold:
                return
            self._peel(cut.members)
            yield

    def _recursive(self) -> Iterator[None]:
        cfg = self.config
        touched: Set[int] = set()
        for eid in self.deleted:
            touched.update(self.graph.endpoints(eid))
        level = 1
        while True:
            h = self._remaining()
            members = h.members
            border = {v for v in touched if v in members}
            for v in members:
                if v not in border and any(u not in members for u, _ in self.graph.incident(v)):
                    border.add(v)
            vol_border = volume(h, border)
            vol_rest = h.total_volume() - vol_border
            self.meter.charge(len(members))
            if vol_border == 0:
                return
            if vol_rest * cfg.sigma < 3 * vol_border:
                logger.info(
                    "prune_fail",
                    vol_border=vol_border,
                    vol_rest=vol_rest,
                    level=level,
                    guaranteed=self.guaranteed,
                )
                if self.guaranteed:
                    self.result = LowConductance("volume_check", self.meter.units)
                else:
                    self.stopped = "volume_check"
                return
            if level == cfg.levels:
                return
            outcome = lbs_cut(
                LbsInstance(h, frozenset(border), cfg.sigma, cfg.level_alphas[level - 1]),
                self.meter,
            )
            yield
            if isinstance(outcome, NoSparseOverlappingCut):
                return
            if outcome.cut.volume * cfg.c_size >= cfg.size_thresholds[level]:
                self._peel(outcome.cut.members)
            else:
                level += 1

    def _peel_components(self) -> Iterator[None]:
        """Keep the heaviest component of the remainder; a no-op on a connected one"""
        h = self._remaining()
        components = connected_components(h)
        self.meter.charge(len(h.members))
        if len(components) <= 1:
            return
        keep = max(components, key=lambda c: (volume(h, c), -min(c)))
        for component in components:
            if component is not keep:
                self._peel(component)
        yield

    def _check_volume(self) -> None:
        """Exact path only: fall back on the brute-force conductance of the graph before"""
        if self.path != PATH_EXACT or self.result is not None:
            return
        pruned_volume = volume(self.graph, self._removed)
        if pruned_volume * self.alpha_b <= 2 * len(self.deleted):
            return
        before, _ = _graph_before(self.graph, self.deleted)
        try:
            _, phi = min_conductance_bruteforce(before, cap=self.exact_cap)
        except InputError:
            return
        if phi < self.alpha_b:
            self.result = LowConductance("volume_check", self.meter.units)

    def _publish(self) -> None:
        alpha: Optional[Fraction]
        if not self.guaranteed:
            alpha = None
        elif self.path == PATH_EXACT:
            alpha = exact_guarantee(self.alpha_b)
        elif self.path == PATH_RECURSIVE:
            alpha = recursive_guarantee(self.alpha_b, self.config.levels)
        else:
            alpha = self.alpha_b
        removed = frozenset(self._removed)
        self.result = Pruned(
            nodes=removed,
            alpha=alpha,
            volume=volume(self.graph, removed),
            path=self.path,
            trail=tuple(self.trail),
            work=self.meter.units,
            stopped=self.stopped,
        )
        logger.debug(
            "prune_done",
            path=self.path,
            pruned=len(removed),
            alpha=None if alpha is None else str(alpha),
            stopped=self.stopped,
            work=self.meter.units,
        )


def one_shot_prune(
    graph: Any,
    deleted: Iterable[int],
    alpha_b: RatioLike,
    epsilon: float,
    exact_cap: Optional[int] = None,
) -> OneShotResult:
    """
    Prune after a batch of deletions

    Returns Pruned(P) such that the remainder is connected, and whenever the
    graph before the deletions was an alpha_b-expander the remainder has
    conductance at least Pruned.alpha and vol(P) <= 2|D| / alpha_b.
    LowConductance is returned only from the volume check or the time limit.

    Raises:
        InputError: above the exact cap, when |D| exceeds regime_capacity()
    """
    return OneShotComputation(graph, deleted, alpha_b, epsilon, exact_cap, strict=True).run()


# -- dynamic schedule ---------------------------------------------------


def schedule_depth(epsilon: float) -> int:
    """Number of scheduled levels, at least two"""
    inverse = math.log(1 / epsilon)
    nested = math.log(inverse) if inverse > 0 else 0.0
    if nested <= 0:
        return 2
    return max(2, math.ceil(inverse / (2 * nested)))


@dataclass(frozen=True)
class LowConductanceHalt:
    """The pruner stopped: some level proved the initial graph was not an expander"""

    level: int
    reason: str
    time: int


@dataclass(frozen=True)
class PruningFailure:
    reason: str
    time: int


@dataclass
class _Install:
    nodes: Optional[FrozenSet[int]]  # None stands for all nodes
    from_time: int


@dataclass
class _Running:
    computation: OneShotComputation
    parent: Optional[FrozenSet[int]]
    from_time: int
    budget: int


@dataclass
class PruneStats:
    deletions: int = 0
    work: List[int] = field(default_factory=list)
    bounds: List[int] = field(default_factory=list)
    installs: List[Tuple[int, int]] = field(default_factory=list)
    paths: Dict[str, int] = field(default_factory=dict)
    unguaranteed: int = 0


class DynamicPruner:
    """
    Dynamic expander pruning over a stream of edge deletions

    Level i recomputes its expander X^i every d_i deletions by pruning the
    latest X^(i-1) snapshot against the deletions that snapshot has not
    seen, spending a fixed slice of its time limit per deletion. The last
    level runs every deletion, and the union of everything pruned is P.

    At the first deletion the periods shrink, where the level alphas allow
    it, so that every window handed to a level stays within its regime.
    Windows that still do not fit are pruned without a guarantee and
    counted in stats.unguaranteed.
    """

    def __init__(
        self,
        graph: Graph,
        epsilon: float,
        alpha0: Optional[RatioLike] = None,
        exact_cap: Optional[int] = None,
    ):
        """
        Initialize the pruner; no scan of the graph happens here

        Args:
            graph: Initial graph; deletions must go through delete()
            epsilon: Trade-off in (0, 1)
            alpha0: Conductance assumed for the initial graph, default n^-epsilon
            exact_cap: Passed on to every one-shot computation
        """
        if not 0 < epsilon < 1:
            raise InputError(f"epsilon {epsilon} outside (0, 1)")
        self.graph = graph
        self.epsilon = epsilon
        self.exact_cap = exact_cap
        n = max(graph.num_nodes(), 1)
        self.depth = schedule_depth(epsilon)
        self.delta = 2 / self.depth
        if alpha0 is None:
            self.alpha0 = Fraction(n**-epsilon).limit_denominator(10**9)
        else:
            self.alpha0 = Fraction(alpha0)
        if not 0 < self.alpha0 <= 1:
            raise InputError(f"alpha0 {self.alpha0} outside (0, 1]")
        self.alphas: List[Fraction] = [self.alpha0]
        rounds = worst_level_count(self.delta)
        for _ in range(self.depth + 1):
            self.alphas.append(recursive_guarantee(self.alphas[-1], rounds))
        self.periods: List[int] = [0] + [
            max(1, math.floor(n ** (1 - i / self.depth))) for i in range(1, self.depth)
        ] + [1, 1]

        self._t0 = graph.clock
        self._sized = False
        self._initial_edges = graph.num_edges()
        self.time = 0
        self.pruned: Set[int] = set()
        self.halted: Optional[LowConductanceHalt] = None
        self._log: Dict[int, int] = {}
        self._installed: Dict[int, Deque[Tuple[int, _Install]]] = {
            i: deque([(0, _Install(None, 0))], maxlen=4) for i in range(self.depth + 2)
        }
        self._running: Dict[int, _Running] = {}
        self.stats = PruneStats()

    @property
    def deletion_budget(self) -> int:
        """Largest deletion count covered by the guarantees"""
        degree = max_degree(self.graph) or 1
        return regime_capacity(self.alpha0, self._initial_edges, degree)

    def level_alpha(self, level: int) -> Fraction:
        return self.alphas[level]

    def snapshot(self, level: int) -> Tuple[Optional[FrozenSet[int]], int]:
        """Latest X^level as (node set or None for all nodes, time it reflects)"""
        install = self._installed[level][-1][1]
        return install.nodes, install.from_time

    def _size_windows(self) -> None:
        """Shorten each period so the child level's window, at most 2 d_i deletions, fits"""
        degree = max_degree(self.graph) or 1
        for level in range(1, self.depth):
            room = regime_capacity(self.alphas[level], self._initial_edges, degree)
            if room >= 2:
                self.periods[level] = min(self.periods[level], room // 2)
        for level in range(2, self.depth + 1):
            self.periods[level] = min(self.periods[level], self.periods[level - 1])
        self._sized = True
        logger.debug("pruner_periods", periods=self.periods[1:], alphas=len(self.alphas))

    def _lookup(self, level: int, time: int) -> _Install:
        found = self._installed[level][0][1]
        for installed_at, install in self._installed[level]:
            if installed_at <= time:
                found = install
        return found

    def _window(self, nodes: Optional[FrozenSet[int]], start: int, end: int) -> List[int]:
        picked = []
        for t in range(start + 1, end + 1):
            eid = self._log.get(t)
            if eid is None:
                continue
            u, v = self.graph.endpoints(eid)
            if nodes is None or (u in nodes and v in nodes):
                picked.append(eid)
        return picked

    def _start(self, level: int, parent: _Install, until: int) -> _Running:
        nodes = parent.nodes
        members: Iterable[int] = self.graph.nodes() if nodes is None else nodes
        view = Subgraph(self.graph, members, self._t0 + until)
        deleted = self._window(nodes, parent.from_time, until)
        computation = OneShotComputation(
            view, deleted, self.alphas[level - 1], self.delta, self.exact_cap
        )
        budget = max(1, math.ceil((computation.work_estimate + 1) / self.periods[level]))
        return _Running(computation, nodes, until, budget)

    def _finish(self, level: int, running: _Running) -> Optional[FrozenSet[int]]:
        computation = running.computation
        if not computation.done:
            raise InvariantViolation(
                f"level {level} computation unfinished at the end of its period "
                f"({computation.meter.units} of {computation.work_estimate} units)"
            )
        result = computation.result
        if isinstance(result, LowConductance):
            self.halted = LowConductanceHalt(level, result.reason, self.time)
            logger.warning("pruner_halt", level=level, reason=result.reason, time=self.time)
            return None
        assert isinstance(result, Pruned)
        paths = self.stats.paths
        paths[result.path] = paths.get(result.path, 0) + 1
        if not result.guaranteed:
            self.stats.unguaranteed += 1
        base = running.parent if running.parent is not None else frozenset(self.graph.nodes())
        self._installed[level].append(
            (self.time, _Install(frozenset(base - result.nodes), running.from_time))
        )
        self.stats.installs.append((level, self.time))
        return result.nodes

    def delete(self, eid: int) -> Union[FrozenSet[int], LowConductanceHalt]:
        """Delete one edge; returns the nodes newly added to P, or the halt"""
        if self.halted is not None:
            raise StateError("pruner halted after proving low conductance")
        if not self._sized:
            self._size_windows()
        self.graph.delete_edge(eid)
        self.time += 1
        tau = self.time
        self._log[tau] = eid
        before = len(self.pruned)
        added: Set[int] = set()
        work = 0
        bound = 0

        for level in range(1, self.depth + 1):
            d = self.periods[level]
            if (tau - 1) % d == 0:
                start = tau - 1
                k_parent = start // self.periods[level - 1] if level > 1 else 0
                parent_time = k_parent * self.periods[level - 1] if level > 1 else 0
                self._running[level] = self._start(
                    level, self._lookup(level - 1, parent_time), start
                )
            running = self._running[level]
            spent = running.computation.meter.units
            running.computation.step(running.budget)
            bound += running.budget
            nodes: Optional[FrozenSet[int]] = frozenset()
            if tau % d == 0:
                nodes = self._finish(level, running)
                del self._running[level]
            work += running.computation.meter.units - spent
            if nodes is None:
                return self._record_halt(work, bound)
            added |= nodes

        last = self.depth + 1
        running = self._start(last, self._lookup(self.depth, tau), tau)
        running.computation.step(running.budget)
        nodes = self._finish(last, running)
        work += running.computation.meter.units
        bound += running.budget
        if nodes is None:
            return self._record_halt(work, bound)
        added |= nodes

        fresh = frozenset(added - self.pruned)
        self.pruned |= fresh
        self.stats.deletions += 1
        self.stats.work.append(work)
        self.stats.bounds.append(bound)
        logger.debug("pruner_step", time=tau, added=len(self.pruned) - before, work=work, bound=bound)
        return fresh

    def _record_halt(self, work: int, bound: int) -> LowConductanceHalt:
        self.stats.deletions += 1
        self.stats.work.append(work)
        self.stats.bounds.append(bound)
        assert self.halted is not None
        return self.halted


def split_side(g: Any, u: int, v: int) -> Optional[Set[int]]:
    """
    After deleting an edge uv: None while u still reaches v, otherwise the
    whole component of whichever endpoint was exhausted first

    Both searches advance in lockstep, so the cost is bounded by the
    smaller side when the component splits.
    """
    if u == v:
        return None
    seen = ({u}, {v})
    queues = (deque([u]), deque([v]))
    while True:
        for side in (0, 1):
            x = queues[side].popleft()
            for y, _ in g.incident(x):
                if y in seen[1 - side]:
                    return None
                if y not in seen[side]:
                    seen[side].add(y)
                    queues[side].append(y)
            if not queues[side]:
                return seen[side]


class LasVegasPruner:
    """
    DynamicPruner that double-checks its own output

    After every deletion the nodes outside P must share one component of the
    current graph; when they do not, or the inner pruner halts, a
    PruningFailure is returned and the pruner stays failed. The check scans
    the graph once, then only searches around each deleted edge.
    """

    def __init__(
        self,
        graph: Graph,
        epsilon: float,
        alpha0: Optional[RatioLike] = None,
        exact_cap: Optional[int] = None,
    ):
        self.inner = DynamicPruner(graph, epsilon, alpha0, exact_cap)
        self.failure: Optional[PruningFailure] = None
        self._spanning: Optional[bool] = None
        self.searched = 0

    @property
    def pruned(self) -> Set[int]:
        return self.inner.pruned

    def spans_remainder(self) -> bool:
        """Whether every node outside P lies in one component of the current graph"""
        g = self.inner.graph
        forest = UnionFind(g.nodes())
        for eid in g.edges():
            u, v = g.endpoints(eid)
            forest.union(u, v)
        roots = {forest.find(v) for v in g.nodes() if v not in self.inner.pruned}
        return len(roots) <= 1

    def _still_spans(self, u: int, v: int) -> bool:
        if self._spanning is None:
            self._spanning = self.spans_remainder()
            return self._spanning
        g = self.inner.graph
        side = split_side(g, u, v)
        if side is None:
            return True
        self.searched += len(side)
        outside = self.inner.pruned
        inside = sum(1 for x in side if x not in outside)
        remainder = g.num_nodes() - len(outside)
        self._spanning = inside == 0 or inside == remainder
        return self._spanning

    def delete(self, eid: int) -> Union[FrozenSet[int], PruningFailure]:
        if self.failure is not None:
            raise StateError(f"pruner already failed: {self.failure.reason}")
        u, v = self.inner.graph.endpoints(eid)
        result = self.inner.delete(eid)
        if isinstance(result, LowConductanceHalt):
            self.failure = PruningFailure(f"halt:{result.reason}", result.time)
        elif not self._still_spans(u, v):
            self.failure = PruningFailure("disconnected", self.inner.time)
        if self.failure is not None:
            logger.warning("pruner_failure", reason=self.failure.reason, time=self.failure.time)
            return self.failure
        return result

#!/usr/bin/env python3
"""
dynmsf - Local Flow
===================

Copyright (c) 2026 dynmsf developers.

Local push-relabel flow routines on unit-capacity multigraphs. Every routine
works on sparse source/sink maps, touches only nodes reached by the flow and
reports either a (pre)flow or a low-conductance level cut.

Features:
- Lowest-label push-relabel engine with current-edge iterators
- Unit Flow and Extended Unit Flow with exact integer preflows
- Excess Scaling Flow and Almost Flow with published volume constants
- Independent preflow checker used by tests and assertion level 2

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Deque, Dict, FrozenSet, List, Optional, Set, Tuple, Union

from .config import assert_level
from .exceptions import InputError, InvariantViolation, WorkLimitExceeded
from .graph_core import Cut, WorkMeter, total_volume
from .logging_setup import get_logger

logger = get_logger(__name__)

# times the label cap may be doubled before a missing level cut is an error
MAX_CAP_EXTENSIONS = 3

Ratio = Union[Fraction, int, float, str]


def _log2_2m(m: int) -> float:
    return math.log2(2 * max(m, 1))


def unit_flow_height(h: int, m: int) -> int:
    """Label cap h' = ceil(41 h log2(2m)) used by the unit flow routines"""
    return math.ceil(41 * h * _log2_2m(m))


@dataclass
class FlowInstance:
    """
    Source/sink instance on a graph or view

    `sink` only lists nodes whose capacity is below their degree; every
    other node absorbs up to deg(v).
    """

    graph: Any
    source: Dict[int, int] = field(default_factory=dict)
    sink: Dict[int, int] = field(default_factory=dict)
    h: int = 1
    F: int = 1

    def sink_capacity(self, v: int) -> int:
        return self.sink.get(v, self.graph.degree(v))

    def artificial_supply(self) -> Dict[int, int]:
        """T̄(v) = deg(v) - T(v), non-zero entries only"""
        result = {}
        for v, cap in self.sink.items():
            gap = self.graph.degree(v) - cap
            if gap > 0:
                result[v] = gap
        return result

    def total_supply(self) -> int:
        return sum(self.source.values())

    def total_sink(self) -> int:
        return total_volume(self.graph) - sum(self.artificial_supply().values())

    def validate(self, require_degree_sink: bool = False) -> None:
        _validate(self.graph, self.source, self.sink, self.F, self.h)
        if require_degree_sink:
            for v, cap in self.sink.items():
                if cap != self.graph.degree(v):
                    raise InputError(f"unit flow requires T(v) = deg(v); node {v} has {cap}")
        if self.total_supply() > self.total_sink():
            raise InputError(
                f"total supply {self.total_supply()} exceeds total sink {self.total_sink()}"
            )


def _validate(graph: Any, source: Dict[int, int], sink: Dict[int, int], F: int, h: int) -> None:
    if h < 1 or F < 1:
        raise InputError(f"h and F must be positive, got h={h}, F={F}")
    for v, amount in source.items():
        if not graph.has_node(v):
            raise InputError(f"source at unknown node {v!r}")
        if amount < 0:
            raise InputError(f"negative supply {amount} at node {v}")
        if amount == 0:
            continue
        deg = graph.degree(v)
        if deg == 0:
            raise InputError(f"isolated node {v} carries supply {amount}")
        if amount > F * deg:
            raise InputError(f"supply {amount} at node {v} exceeds F*deg = {F * deg}")
    for v, cap in sink.items():
        if not graph.has_node(v):
            raise InputError(f"sink at unknown node {v!r}")
        if cap < 0 or cap > graph.degree(v):
            raise InputError(f"sink capacity {cap} at node {v} outside [0, deg]")


@dataclass
class Preflow:
    """
    Integral preflow stored per edge id

    A positive value on edge e with endpoints (a, b) moves supply from a to
    b; the reverse direction is the negation, so antisymmetry holds by
    construction.
    """

    graph: Any
    source: Dict[int, int] = field(default_factory=dict)
    sink: Dict[int, int] = field(default_factory=dict)
    edge_flow: Dict[int, int] = field(default_factory=dict)

    def sink_capacity(self, v: int) -> int:
        return self.sink.get(v, self.graph.degree(v))

    def inflow(self) -> Dict[int, int]:
        net: Dict[int, int] = defaultdict(int)
        for eid, amount in self.edge_flow.items():
            a, b = self.graph.endpoints(eid)
            net[a] -= amount
            net[b] += amount
        return dict(net)

    def support(self) -> Set[int]:
        nodes = {v for v, amount in self.source.items() if amount > 0}
        for eid, amount in self.edge_flow.items():
            if amount:
                nodes.update(self.graph.endpoints(eid))
        return nodes

    def supply_at(self, v: int, inflow: Optional[Dict[int, int]] = None) -> int:
        """f(v) = Δ(v) + net inflow"""
        net = self.inflow() if inflow is None else inflow
        return self.source.get(v, 0) + net.get(v, 0)

    def excess(self, v: int) -> int:
        return max(self.supply_at(v) - self.sink_capacity(v), 0)

    def absorbed(self, v: int) -> int:
        return min(self.sink_capacity(v), self.supply_at(v))

    def excess_map(self) -> Dict[int, int]:
        net = self.inflow()
        result = {}
        for v in self.support():
            ex = self.supply_at(v, net) - self.sink_capacity(v)
            if ex > 0:
                result[v] = ex
        return result

    def absorbed_map(self) -> Dict[int, int]:
        net = self.inflow()
        result = {}
        for v in self.support():
            ab = min(self.sink_capacity(v), self.supply_at(v, net))
            if ab > 0:
                result[v] = ab
        return result

    def total_excess(self) -> int:
        return sum(self.excess_map().values())

    def total_absorbed(self) -> int:
        return sum(self.absorbed_map().values())

    def pair_flow(self, u: int, v: int) -> int:
        """Net flow from u to v summed over parallel edges"""
        total = 0
        for eid, amount in self.edge_flow.items():
            a, b = self.graph.endpoints(eid)
            if (a, b) == (u, v):
                total += amount
            elif (a, b) == (v, u):
                total -= amount
        return total

    def congestion(self) -> int:
        return max((abs(x) for x in self.edge_flow.values()), default=0)

    def add(self, edge_flow: Dict[int, int], scale: int = 1) -> None:
        for eid, amount in edge_flow.items():
            value = self.edge_flow.get(eid, 0) + amount * scale
            if value:
                self.edge_flow[eid] = value
            else:
                self.edge_flow.pop(eid, None)


def check_preflow(preflow: Preflow, congestion_bound: Optional[int] = None) -> List[str]:
    """
    Independent preflow checker

    Returns a list of human-readable violations; an empty list means the
    preflow is supported on visible edges, within the congestion bound,
    source-feasible, and its excess/absorb split adds up to |Δ|.
    """
    g = preflow.graph
    problems: List[str] = []
    for eid, amount in sorted(preflow.edge_flow.items()):
        try:
            a, b = g.endpoints(eid)
        except InputError:
            problems.append(f"flow on unknown edge {eid}")
            continue
        if not (g.has_node(a) and g.has_node(b)) or all(e != eid for _, e in g.incident(a)):
            problems.append(f"flow on edge {eid} outside the graph")
        if congestion_bound is not None and abs(amount) > congestion_bound:
            problems.append(f"edge {eid} carries {amount} > bound {congestion_bound}")

    net = preflow.inflow()
    total_ex = 0
    total_ab = 0
    for v in sorted(preflow.support()):
        sent = -net.get(v, 0)
        if sent > preflow.source.get(v, 0):
            problems.append(f"node {v} sends {sent} but holds supply {preflow.source.get(v, 0)}")
        f_v = preflow.supply_at(v, net)
        cap = preflow.sink_capacity(v)
        ex = max(f_v - cap, 0)
        ab = min(cap, f_v)
        if ex + ab != f_v:
            problems.append(f"node {v}: excess {ex} + absorbed {ab} != {f_v}")
        total_ex += ex
        total_ab += ab
    supplied = sum(preflow.source.values())
    if total_ex + total_ab != supplied:
        problems.append(f"excess {total_ex} + absorbed {total_ab} != supply {supplied}")
    return problems


@dataclass
class FlowOutcome:
    """Result of a flow routine: a preflow and, when stuck, a level cut"""

    preflow: Preflow
    total_excess: int
    cut: Optional[Cut] = None
    work: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_flow(self) -> bool:
        return self.total_excess == 0

    @property
    def capacity(self) -> Optional[int]:
        return self.metadata.get("capacity")

    def get_outcome_info(self) -> Dict[str, Any]:
        return {
            "total_excess": self.total_excess,
            "congestion": self.preflow.congestion(),
            "cut_size": None if self.cut is None else len(self.cut),
            "cut_volume": None if self.cut is None else self.cut.volume,
            "work": self.work,
            **{k: v for k, v in self.metadata.items() if not isinstance(v, list)},
        }


class PushRelabel:
    """
    Lowest-label push-relabel over unit-capacity edges

    Active nodes sit in per-label FIFO buckets and the lowest non-empty
    bucket is always served first. A node whose label reaches the cap
    leaves the queue with its excess. Node state is created lazily, so the
    work is proportional to the region the supply actually reaches.
    """

    def __init__(
        self,
        graph: Any,
        supply: Dict[int, int],
        sink: Callable[[int], int],
        node_factor: int,
        capacity: int,
        label_cap: int,
        meter: Optional[WorkMeter] = None,
    ):
        """
        Args:
            graph: Graph or view, read only
            supply: Initial supply per node
            sink: Sink capacity per node
            node_factor: A node accepts pushes only while f(u) < node_factor * deg(u)
            capacity: Per-edge flow bound U
            label_cap: Label height at which a node stops being active
            meter: Optional work meter charged one unit per push/relabel step
        """
        if label_cap < 1 or capacity < 1 or node_factor < 1:
            raise InputError("label cap, capacity and node factor must be positive")
        self.graph = graph
        self.node_factor = node_factor
        self.capacity = capacity
        self.label_cap = label_cap
        self.meter = meter if meter is not None else WorkMeter()
        self.edge_flow: Dict[int, int] = {}
        self.pushes = 0
        self.relabels = 0

        self._sink_of = sink
        self._held: Dict[int, int] = {}
        self._label: Dict[int, int] = {}
        self._adj: Dict[int, List[Tuple[int, int]]] = {}
        self._deg: Dict[int, int] = {}
        self._sink: Dict[int, int] = {}
        self._current: Dict[int, int] = {}
        self._buckets: Dict[int, Deque[int]] = defaultdict(deque)
        self._queued: Set[int] = set()
        self._low = 0

        for v in sorted(supply):
            amount = supply[v]
            if amount > 0:
                self._touch(v)
                self._held[v] += amount
        for v in sorted(self._held):
            if self.excess(v) > 0:
                self._enqueue(v)

    def _touch(self, v: int) -> None:
        if v in self._held:
            return
        if not self.graph.has_node(v):
            raise InputError(f"unknown node {v!r}")
        adj = sorted(self.graph.incident(v), key=lambda pair: pair[1])
        self._held[v] = 0
        self._label[v] = 0
        self._current[v] = 0
        self._adj[v] = adj
        self._deg[v] = len(adj)
        self._sink[v] = self._sink_of(v)

    def _enqueue(self, v: int) -> None:
        label = self._label[v]
        self._buckets[label].append(v)
        self._queued.add(v)
        if label < self._low:
            self._low = label

    def _dequeue(self, v: int) -> None:
        bucket = self._buckets[self._label[v]]
        head = bucket.popleft()
        if head != v:
            raise InvariantViolation(f"queue order broken: expected {v}, found {head}")
        self._queued.discard(v)

    def excess(self, v: int) -> int:
        if v not in self._held:
            return 0
        return max(self._held[v] - self._sink[v], 0)

    def absorbed(self, v: int) -> int:
        if v not in self._held:
            return 0
        return min(self._sink[v], self._held[v])

    def label(self, v: int) -> int:
        return self._label.get(v, 0)

    def touched(self) -> List[int]:
        return sorted(self._held)

    def total_excess(self) -> int:
        return sum(self.excess(v) for v in self._held)

    def absorbed_map(self) -> Dict[int, int]:
        return {v: self.absorbed(v) for v in self._held if self.absorbed(v) > 0}

    def _directed(self, v: int, eid: int) -> int:
        a, _ = self.graph.endpoints(eid)
        amount = self.edge_flow.get(eid, 0)
        return amount if v == a else -amount

    def _send(self, v: int, eid: int, amount: int) -> None:
        a, _ = self.graph.endpoints(eid)
        value = self.edge_flow.get(eid, 0) + (amount if v == a else -amount)
        if value:
            self.edge_flow[eid] = value
        else:
            self.edge_flow.pop(eid, None)

    def _lowest(self) -> Optional[int]:
        while self._low < self.label_cap and not self._buckets.get(self._low):
            self._low += 1
        return self._low if self._low < self.label_cap else None

    def run(self) -> None:
        while True:
            label = self._lowest()
            if label is None:
                return
            if self.meter.exceeded():
                raise WorkLimitExceeded(self.meter.units, self.meter.limit or 0)
            self._push_relabel(self._buckets[label][0])

    def _push_relabel(self, v: int) -> None:
        self.meter.charge()
        adj = self._adj[v]
        if not adj:
            self._dequeue(v)
            self._label[v] = self.label_cap
            return

        i = self._current[v]
        u, eid = adj[i]
        self._touch(u)
        residual = self.capacity - self._directed(v, eid)
        room = self.node_factor * self._deg[u] - self._held[u]
        if residual > 0 and room > 0 and self._label[v] == self._label[u] + 1:
            psi = min(self.excess(v), residual, room)
            self._send(v, eid, psi)
            self._held[v] -= psi
            self._held[u] += psi
            self.pushes += 1
            if u not in self._queued and self.excess(u) > 0 and self._label[u] < self.label_cap:
                self._enqueue(u)
            if self.excess(v) == 0:
                self._dequeue(v)
            return

        if i + 1 < len(adj):
            self._current[v] = i + 1
            return

        self._current[v] = 0
        self._dequeue(v)
        self._label[v] += 1
        self.relabels += 1
        if self._label[v] < self.label_cap:
            self._enqueue(v)

    def extend(self, label_cap: int) -> None:
        """Raise the label cap and reactivate nodes parked at the old one"""
        if label_cap <= self.label_cap:
            return
        old = self.label_cap
        self.label_cap = label_cap
        for v in sorted(self._held):
            if self._label[v] >= old and self.excess(v) > 0 and v not in self._queued:
                self._label[v] = old
                self._enqueue(v)

    def level_cut(self, threshold: Union[Fraction, float], strict: bool) -> Optional[Cut]:
        """
        Lowest label level {v : l(v) >= j} whose conductance meets the threshold

        Level sets are grown from the top label down, keeping volume and
        boundary incremental.
        """
        g = self.graph
        total = total_volume(g)
        n = g.num_nodes()
        by_label: Dict[int, List[int]] = defaultdict(list)
        for v, l in self._label.items():
            if l > 0:
                by_label[l].append(v)

        members: Set[int] = set()
        vol = 0
        delta = 0
        best: Optional[Tuple[int, FrozenSet[int], int, int]] = None
        for level in sorted(by_label, reverse=True):
            for v in by_label[level]:
                members.add(v)
                vol += self._deg[v]
                for u, _ in self._adj[v]:
                    delta += -1 if u in members else 1
            if len(members) >= n:
                continue
            den = min(vol, total - vol)
            if den <= 0:
                continue
            phi = Fraction(delta, den)
            if phi < threshold or (not strict and phi == threshold):
                best = (level, frozenset(members), vol, delta)
        if best is None:
            return None
        _, chosen, vol, delta = best
        return Cut(chosen, vol, delta)


def _run_core(
    graph: Any,
    supply: Dict[int, int],
    sink: Callable[[int], int],
    node_factor: int,
    capacity: int,
    h: int,
    meter: WorkMeter,
    name: str,
) -> Tuple[PushRelabel, Optional[Cut], int]:
    """Unit flow core: run to the cap, then extract a 1/h-sparse level cut"""
    label_cap = unit_flow_height(h, graph.num_edges())
    engine = PushRelabel(graph, supply, sink, node_factor, capacity, label_cap, meter)
    engine.run()
    threshold = Fraction(1, h)
    cut: Optional[Cut] = None
    extensions = 0
    while engine.total_excess() > 0:
        cut = engine.level_cut(threshold, strict=True)
        if cut is not None:
            break
        if extensions == MAX_CAP_EXTENSIONS:
            raise InvariantViolation(f"{name}: no level cut below 1/{h} after {extensions} extensions")
        extensions += 1
        logger.warning("label_cap_extended", routine=name, cap=engine.label_cap * 2)
        engine.extend(engine.label_cap * 2)
        engine.run()
    return engine, cut, extensions


def _finish(
    preflow: Preflow,
    cut: Optional[Cut],
    start: int,
    meter: WorkMeter,
    bound: int,
    metadata: Dict[str, Any],
    name: str,
) -> FlowOutcome:
    outcome = FlowOutcome(
        preflow=preflow,
        total_excess=preflow.total_excess(),
        cut=cut,
        work=meter.units - start,
        metadata=metadata,
    )
    if assert_level() >= 2:
        problems = check_preflow(preflow, bound)
        if problems:
            raise InvariantViolation(f"{name}: " + "; ".join(problems[:5]))
    logger.debug(
        "flow_finished",
        routine=name,
        total_excess=outcome.total_excess,
        cut_volume=None if cut is None else cut.volume,
        work=outcome.work,
    )
    return outcome


def unit_flow(inst: FlowInstance, meter: Optional[WorkMeter] = None) -> FlowOutcome:
    """
    Unit Flow on an instance whose sinks equal the degrees

    Uses node factor F, edge capacity U = 2hF and label cap
    ceil(41 h log2(2m)). Returns a flow, or a cut with conductance below
    1/h containing every node left with excess.
    """
    inst.validate(require_degree_sink=True)
    meter = meter if meter is not None else WorkMeter()
    start = meter.units
    g = inst.graph
    capacity = 2 * inst.h * inst.F
    engine, cut, extensions = _run_core(
        g, inst.source, g.degree, inst.F, capacity, inst.h, meter, "unit_flow"
    )
    preflow = Preflow(g, dict(inst.source), dict(inst.sink), dict(engine.edge_flow))
    metadata = {
        "h_prime": engine.label_cap,
        "capacity": capacity,
        "node_factor": inst.F,
        "cap_extensions": extensions,
        "pushes": engine.pushes,
        "relabels": engine.relabels,
    }
    return _finish(preflow, cut, start, meter, capacity, metadata, "unit_flow")


def extended_unit_flow(inst: FlowInstance, meter: Optional[WorkMeter] = None) -> FlowOutcome:
    """
    Unit Flow generalized to sinks below the degree

    Every node with T(v) < deg(v) receives T̄(v) = deg(v) - T(v) artificial
    supply and the core runs with sinks equal to the degrees, node
    factor F + 1 and edge capacity 2hF, so the congestion stays within
    2hF as for the plain routine. The excess of the result w.r.t. (Δ, T)
    equals the core's excess, so a returned cut has vol(S) >= total_excess / F.
    """
    inst.validate()
    meter = meter if meter is not None else WorkMeter()
    start = meter.units
    g = inst.graph
    supply: Dict[int, int] = defaultdict(int)
    for v, amount in inst.source.items():
        if amount > 0:
            supply[v] += amount
    for v, amount in inst.artificial_supply().items():
        supply[v] += amount

    node_factor = inst.F + 1
    capacity = 2 * inst.h * inst.F
    engine, cut, extensions = _run_core(
        g, dict(supply), g.degree, node_factor, capacity, inst.h, meter, "extended_unit_flow"
    )
    preflow = Preflow(g, dict(inst.source), dict(inst.sink), dict(engine.edge_flow))
    metadata = {
        "h_prime": engine.label_cap,
        "capacity": capacity,
        "node_factor": node_factor,
        "artificial_supply": sum(inst.artificial_supply().values()),
        "cap_extensions": extensions,
        "pushes": engine.pushes,
        "relabels": engine.relabels,
    }
    return _finish(preflow, cut, start, meter, capacity, metadata, "extended_unit_flow")


def scaling_threshold(h: int, U: int, m: int) -> float:
    """Conductance bound 20 log2(2m)/h + 4/U of excess-scaling cuts"""
    return 20 * _log2_2m(m) / h + 4 / U


def initial_scale(F: int) -> int:
    """Largest power of two mu with F/4 <= mu < F/2 (F >= 4)"""
    if F < 4:
        raise InputError(f"scaling needs F >= 4, got {F}")
    return 1 << ((F - 1).bit_length() - 2)


def _sink_function(graph: Any, sink: Dict[int, int]) -> Callable[[int], int]:
    def capacity(v: int) -> int:
        return sink.get(v, graph.degree(v))

    return capacity


def excess_scaling_flow(
    graph: Any,
    F: int,
    source: Dict[int, int],
    sink: Dict[int, int],
    tau: Ratio,
    U: int,
    h: int,
    meter: Optional[WorkMeter] = None,
    validate: bool = True,
) -> FlowOutcome:
    """
    Route supply in scaled units mu_0, mu_0/2, ..., 1

    Each round runs the core with node factor 4, label cap h and edge
    capacity U on floor(Δ_j / mu_j); absorbed units are carried to the next
    round and rounded-off remainders stay put. The routine stops with a cut
    once a round's level cut has volume at least
    tau |Δ| / (4 mu_j R), R being the number of scales, and with a preflow
    once every remaining supply fits its sink.

    Args:
        graph: Graph or view with the supply
        F: Supply density; values below 4 are raised to 4
        source: Supply per node, Δ(v) <= F deg(v)
        sink: Sparse sink capacities below the degree
        tau: Target excess ratio in (0, 1)
        U: Per-round edge capacity
        h: Label cap of each round, at least log2 m
        meter: Optional work meter
        validate: Check the instance preconditions
    """
    ratio = Fraction(tau) if not isinstance(tau, float) else Fraction(tau).limit_denominator(10**6)
    if not 0 < ratio < 1:
        raise InputError(f"tau must lie in (0, 1), got {tau}")
    if U < 1:
        raise InputError(f"U must be positive, got {U}")
    if validate:
        FlowInstance(graph, source, sink, h=h, F=F).validate()
    m = graph.num_edges()
    if h < 1 or (m > 1 and h < math.log2(m)):
        raise InputError(f"h must be at least log2(m) = {math.log2(max(m, 1)):.2f}, got {h}")

    meter = meter if meter is not None else WorkMeter()
    start = meter.units
    scale_f = max(F, 4)
    mu0 = initial_scale(scale_f)
    scales = mu0.bit_length()
    threshold = scaling_threshold(h, U, m)
    total = sum(source.values())
    sink_of = _sink_function(graph, sink)
    preflow = Preflow(graph, dict(source), dict(sink), {})
    metadata: Dict[str, Any] = {
        "capacity": U * scale_f,
        "node_factor": 4,
        "mu0": mu0,
        "phi_threshold": threshold,
        "F_used": scale_f,
        "rounds": [],
    }
    if scale_f != F:
        metadata["F_normalized_from"] = F
        logger.debug("scaling_f_normalized", given=F, used=scale_f)
    if total == 0:
        metadata["volume_floor"] = Fraction(0)
        return _finish(preflow, None, start, meter, U * scale_f, metadata, "excess_scaling_flow")

    current = {v: d for v, d in source.items() if d > 0}
    for j in range(scales):
        mu = mu0 >> j
        scaled = {v: d // mu for v, d in current.items() if d // mu > 0}
        engine = PushRelabel(graph, scaled, sink_of, 4, U, h, meter)
        engine.run()
        preflow.add(engine.edge_flow, mu)

        absorbed = engine.absorbed_map()
        following: Dict[int, int] = {}
        for v in set(current) | set(absorbed):
            value = absorbed.get(v, 0) * mu + current.get(v, 0) % mu
            if value > 0:
                following[v] = value

        cut = engine.level_cut(threshold, strict=False) if engine.total_excess() > 0 else None
        floor = ratio * total / (4 * mu * scales)
        metadata["rounds"].append(
            {
                "mu": mu,
                "excess": engine.total_excess(),
                "cut_volume": None if cut is None else cut.volume,
            }
        )
        if cut is not None and cut.volume >= floor:
            metadata["volume_floor"] = floor
            return _finish(preflow, cut, start, meter, U * scale_f, metadata, "excess_scaling_flow")
        if all(amount <= sink_of(v) for v, amount in following.items()):
            metadata["volume_floor"] = floor
            return _finish(preflow, None, start, meter, U * scale_f, metadata, "excess_scaling_flow")
        current = following

    raise InvariantViolation("excess scaling did not settle at unit scale")


def almost_flow(
    graph: Any,
    F: int,
    source: Dict[int, int],
    sink: Dict[int, int],
    U: int,
    h: int,
    meter: Optional[WorkMeter] = None,
) -> FlowOutcome:
    """
    Repeat excess scaling with tau = 1/2 on the leftover excess

    After a flow round the excess becomes the next source and the absorbed
    amounts are subtracted from the sinks. A cut round ends the loop and
    returns the flow accumulated before it. The metadata lists per-round
    absorb vectors and the residual supply s at termination.
    """
    FlowInstance(graph, source, sink, h=h, F=F).validate()
    meter = meter if meter is not None else WorkMeter()
    start = meter.units
    total = sum(source.values())
    sink_now = dict(sink)
    current = {v: d for v, d in source.items() if d > 0}
    preflow = Preflow(graph, dict(source), dict(sink), {})
    scale_f = max(F, 4)
    rounds: List[Dict[int, int]] = []
    metadata: Dict[str, Any] = {
        "phi_threshold": scaling_threshold(h, U, graph.num_edges()),
        "rounds": rounds,
        "residual_supply": 0,
        "iteration_bound": max(total, 1).bit_length(),
    }

    while sum(current.values()) > 0:
        if len(rounds) >= metadata["iteration_bound"]:
            raise InvariantViolation(f"almost flow exceeded {len(rounds)} rounds")
        result = excess_scaling_flow(
            graph, F, current, sink_now, Fraction(1, 2), U, h, meter, validate=False
        )
        if result.cut is not None:
            metadata["residual_supply"] = sum(current.values())
            metadata["volume_floor"] = result.metadata["volume_floor"]
            metadata["capacity"] = U * scale_f * max(len(rounds), 1)
            return _finish(
                preflow, result.cut, start, meter, metadata["capacity"], metadata, "almost_flow"
            )
        absorbed = result.preflow.absorbed_map()
        preflow.add(result.preflow.edge_flow)
        rounds.append(absorbed)
        for v, amount in absorbed.items():
            sink_now[v] = sink_now.get(v, graph.degree(v)) - amount
        current = result.preflow.excess_map()

    metadata["capacity"] = U * scale_f * max(len(rounds), 1)
    return _finish(preflow, None, start, meter, metadata["capacity"], metadata, "almost_flow")


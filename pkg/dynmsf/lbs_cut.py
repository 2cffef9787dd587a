#!/usr/bin/env python3
"""
dynmsf - Locally Balanced Sparse Cuts
=====================================

Copyright (c) 2026 dynmsf developers.

Approximate locally balanced sparse cut built on Extended Unit Flow, plus
the exhaustive oracle for the largest sparse cut overlapping a node set.

Features:
- Supply F*deg on A, sinks deg(v) outside A and 0 inside A
- Published c_size / c_con computed from the measured congestion
- Brute-force OPT(G, alpha, A, sigma) for small graphs

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, FrozenSet, Iterable, Optional, Tuple, Union

from .config import get_settings
from .exceptions import InputError, InvariantViolation, OracleScaleError
from .flow import FlowInstance, FlowOutcome, extended_unit_flow
from .graph_core import Cut, WorkMeter, conductance, make_cut, total_volume, volume
from .logging_setup import get_logger

logger = get_logger(__name__)

RatioLike = Union[Fraction, int, str]


def overlap(g: Any, s: Iterable[int], a: Iterable[int]) -> Fraction:
    """vol(S ∩ A) / vol(S)"""
    members = frozenset(s)
    vol_s = volume(g, members)
    if vol_s == 0:
        raise InputError("overlap undefined for a zero-volume set")
    return Fraction(volume(g, members & frozenset(a)), vol_s)


@dataclass(frozen=True)
class LbsInstance:
    graph: Any
    A: FrozenSet[int]
    sigma: Fraction
    alpha: Fraction

    @classmethod
    def create(cls, graph: Any, a: Iterable[int], sigma: RatioLike, alpha: RatioLike) -> "LbsInstance":
        return cls(graph, frozenset(a), Fraction(sigma), Fraction(alpha))

    def validate(self) -> None:
        g = self.graph
        for v in self.A:
            if not g.has_node(v):
                raise InputError(f"A contains unknown node {v!r}")
        vol_a = volume(g, self.A)
        vol_rest = total_volume(g) - vol_a
        if 2 * vol_a > vol_rest:
            raise InputError(f"2 vol(A) = {2 * vol_a} exceeds vol(V-A) = {vol_rest}")
        floor = Fraction(2 * vol_a, vol_rest) if vol_rest else Fraction(0)
        if not floor <= self.sigma <= 1 or self.sigma <= 0:
            raise InputError(f"sigma {self.sigma} outside [{floor}, 1]")
        if not 0 < self.alpha <= 1:
            raise InputError(f"alpha {self.alpha} outside (0, 1]")


@dataclass(frozen=True)
class SparseCut:
    """A cut with phi < alpha and vol(S) <= vol(V - S)"""

    cut: Cut
    conductance: Fraction
    c_size: Fraction
    c_con: Fraction
    total_excess: int
    congestion: int


@dataclass(frozen=True)
class NoSparseOverlappingCut:
    """Certificate that no (A, sigma)-overlapping cut is (alpha / c_con)-sparse"""

    c_con: Fraction
    congestion: int


LbsOutcome = Union[SparseCut, NoSparseOverlappingCut]


def lbs_parameters(sigma: Fraction, alpha: Fraction) -> Tuple[int, int]:
    """(F, h) = (ceil(1/sigma), ceil(1/alpha))"""
    return math.ceil(1 / sigma), math.ceil(1 / alpha)


def lbs_cut(inst: LbsInstance, meter: Optional[WorkMeter] = None) -> LbsOutcome:
    """
    Locally balanced sparse cut

    Every node of A starts with F*deg(v) supply and cannot absorb; nodes
    outside A absorb up to their degree. A complete flow certifies that no
    large overlapping sparse cut exists; otherwise the flow's level cut
    (or its complement, whichever has smaller volume) is returned.
    """
    inst.validate()
    g = inst.graph
    F, h = lbs_parameters(inst.sigma, inst.alpha)
    source = {v: F * g.degree(v) for v in inst.A if g.degree(v) > 0}
    sink = {v: 0 for v in inst.A}
    outcome: FlowOutcome = extended_unit_flow(FlowInstance(g, source, sink, h=h, F=F), meter)

    congestion = outcome.preflow.congestion()
    c_con = max(Fraction(1), 2 * inst.alpha * congestion / inst.sigma)
    if outcome.total_excess == 0:
        logger.debug("lbs_no_cut", a_size=len(inst.A), c_con=str(c_con), congestion=congestion)
        return NoSparseOverlappingCut(c_con, congestion)

    cut = outcome.cut
    if cut is None:
        raise InvariantViolation("flow left excess without a level cut")
    other = total_volume(g) - cut.volume
    if cut.volume > other:
        cut = make_cut(g, frozenset(g.nodes()) - cut.members)
    phi = conductance(g, cut)
    c_size = max(
        Fraction(2 * F) / inst.sigma,
        Fraction(2 * outcome.total_excess) / (inst.sigma * cut.volume),
    )
    logger.debug(
        "lbs_cut_found",
        size=len(cut),
        volume=cut.volume,
        phi=str(phi),
        c_size=str(c_size),
        c_con=str(c_con),
    )
    return SparseCut(cut, phi, c_size, c_con, outcome.total_excess, congestion)


def opt_overlapping_bruteforce(
    g: Any,
    alpha: RatioLike,
    a: Iterable[int],
    sigma: RatioLike,
    cap: Optional[int] = None,
) -> int:
    """
    Largest volume of an alpha-sparse (A, sigma)-overlapping cut S with
    vol(S) <= vol(V - S); 0 when there is none
    """
    limit = get_settings().oracle.lbs_cap if cap is None else cap
    order = sorted(g.nodes())
    n = len(order)
    if n > limit:
        raise OracleScaleError("opt_overlapping_bruteforce", n, limit)
    alpha_q = Fraction(alpha)
    sigma_q = Fraction(sigma)
    in_a = frozenset(a)
    index = {v: i for i, v in enumerate(order)}
    degrees = [g.degree(v) for v in order]
    a_mask = 0
    for v in in_a:
        if v in index:
            a_mask |= 1 << index[v]
    edges = [
        (index[u], index[v]) for u, v in (g.endpoints(eid) for eid in g.edges())
    ]
    total = sum(degrees)

    best = 0
    for mask in range(1, (1 << n) - 1):
        vol_s = 0
        vol_sa = 0
        for i in range(n):
            if mask >> i & 1:
                vol_s += degrees[i]
                if a_mask >> i & 1:
                    vol_sa += degrees[i]
        if vol_s == 0 or vol_s > total - vol_s or vol_s <= best:
            continue
        if vol_sa < sigma_q * vol_s:
            continue
        delta = sum(1 for x, y in edges if (mask >> x & 1) != (mask >> y & 1))
        if Fraction(delta, vol_s) < alpha_q:
            best = vol_s
    return best

#!/usr/bin/env python3
"""
dynmsf - Verification Harness
=============================

Copyright (c) 2026 dynmsf developers.

Graph and update-stream generation, oracle-checked replay and benchmark
tables for every MSF engine in the package.

Features:
- Graph models: random 3-regular, barbell, cycle and Erdos-Renyi
- Line-oriented update traces (`D u v`, `I u v w`, `B k`)
- Step-by-step verification against Kruskal replay
- Fault injection as a negative control
- CSV benchmark rows with work units and wall-time percentiles

Author: dynmsf developers
Version: 1.0.0
License: MIT
"""

import csv
import io
import math
import random
import statistics
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Any, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

import networkx as nx
from typing_extensions import Protocol

from .config import get_settings
from .contraction import multigraph_factory
from .dynamic_msf import DynamicMsf, Engine, Failure
from .exceptions import DynMsfError, EngineFailure, InputError
from .graph_core import Graph, format_edge_list, read_edge_list
from .logging_setup import get_logger
from .msf_support import KruskalReplay, MsfDelta

logger = get_logger(__name__)


class GraphModel(str, Enum):
    RANDOM_3_REGULAR = "random-3-regular"
    BARBELL = "barbell"
    CYCLE = "cycle"
    ER = "er"


class EngineChoice(str, Enum):
    DYNMSF = "dynmsf"
    FEWNONTREE = "fewnontree"
    DECREMENTAL = "decremental"
    ORACLE = "oracle"


# -- traces ------------------------------------------------------------------


@dataclass(frozen=True)
class DeleteOp:
    u: int
    v: int

    def line(self) -> str:
        return f"D {self.u} {self.v}"


@dataclass(frozen=True)
class InsertOp:
    edges: Tuple[Tuple[int, int, int], ...]

    def lines(self) -> List[str]:
        rows = [f"I {u} {v} {w}" for u, v, w in self.edges]
        if len(self.edges) == 1:
            return rows
        return [f"B {len(self.edges)}"] + rows


TraceOp = Union[DeleteOp, InsertOp]


@dataclass
class UpdateTrace:
    n: int
    m: int
    seed: int
    ops: List[TraceOp] = field(default_factory=list)

    def format(self) -> str:
        rows = [f"{self.n} {self.m} {self.seed}"]
        for op in self.ops:
            if isinstance(op, DeleteOp):
                rows.append(op.line())
            else:
                rows.extend(op.lines())
        return "\n".join(rows) + "\n"


def parse_trace(stream: TextIO, batch_size: Optional[int] = None) -> UpdateTrace:
    """
    Parse a trace: header `n m seed`, then `D u v`, `I u v w` and `B k` records

    A `B k` record is followed by exactly k `I` lines forming one batch.
    """
    limit = batch_size or get_settings().harness.batch_size
    lines = [line.split() for line in stream if line.strip() and not line.startswith("#")]
    if not lines:
        raise InputError("empty trace")
    try:
        header = [int(tok) for tok in lines[0]]
        if len(header) != 3:
            raise InputError("trace header must be `n m seed`")
        trace = UpdateTrace(*header)
        i = 1
        while i < len(lines):
            tokens = lines[i]
            tag, args = tokens[0], [int(tok) for tok in tokens[1:]]
            if tag == "D" and len(args) == 2:
                trace.ops.append(DeleteOp(*args))
                i += 1
            elif tag == "I" and len(args) == 3:
                trace.ops.append(InsertOp(((args[0], args[1], args[2]),)))
                i += 1
            elif tag == "B" and len(args) == 1:
                k = args[0]
                if k < 1 or k > limit:
                    raise InputError(f"batch of {k} outside 1..{limit}")
                rows = lines[i + 1 : i + 1 + k]
                if len(rows) != k or any(row[0] != "I" or len(row) != 4 for row in rows):
                    raise InputError(f"batch at record {i} needs {k} insert lines")
                batch = tuple((int(r[1]), int(r[2]), int(r[3])) for r in rows)
                trace.ops.append(InsertOp(batch))
                i += 1 + k
            else:
                raise InputError(f"malformed trace record: {' '.join(tokens)}")
    except ValueError as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"non-integer token in trace: {e}")
    return trace


def read_trace(path: Union[str, Path], batch_size: Optional[int] = None) -> UpdateTrace:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace(fh, batch_size)


# -- generation --------------------------------------------------------------


def _model_graph(model: GraphModel, n: int, seed: int) -> "nx.Graph":
    if model is GraphModel.RANDOM_3_REGULAR:
        if n < 4 or n % 2:
            raise InputError("random-3-regular needs an even n >= 4")
        return nx.random_regular_graph(3, n, seed=seed)
    if model is GraphModel.BARBELL:
        if n < 6:
            raise InputError("barbell needs n >= 6")
        bell = n // 3
        return nx.barbell_graph(bell, n - 2 * bell)
    if model is GraphModel.CYCLE:
        if n < 3:
            raise InputError("cycle needs n >= 3")
        return nx.cycle_graph(n)
    if n < 2:
        raise InputError("er needs n >= 2")
    p = min(1.0, 2 * math.log(n) / n)
    return nx.gnp_random_graph(n, p, seed=seed)


def generate_graph(model: Union[str, GraphModel], n: int, seed: int) -> Graph:
    """Model graph with the weights 1..m assigned by a seeded shuffle"""
    model = GraphModel(model)
    nxg = _model_graph(model, n, seed)
    pairs = sorted((min(u, v), max(u, v)) for u, v in nxg.edges())
    weights = list(range(1, len(pairs) + 1))
    random.Random(seed).shuffle(weights)
    return Graph.from_edges(n, [(u, v, w) for (u, v), w in zip(pairs, weights)])


def generate_trace(
    g: Graph,
    ops: int,
    seed: int,
    insert_ratio: float = 0.25,
    batch_size: Optional[int] = None,
) -> UpdateTrace:
    """
    Random update stream on a copy of g

    Deletions pick a uniformly random alive edge; insertions add batches of
    fresh edges between distinct nodes with weights above every weight seen
    so far, so all weights stay distinct.
    """
    limit = batch_size or get_settings().harness.batch_size
    rng = random.Random(seed + 1)
    live = g.copy()
    trace = UpdateTrace(g.num_nodes(), g.num_edges(), seed)
    next_weight = max((int(live.weight(e)) for e in live.edges()), default=0) + 1
    n = live.num_nodes()
    for _ in range(ops):
        alive = sorted(live.edges())
        if n >= 2 and (not alive or rng.random() < insert_ratio):
            size = rng.randint(1, min(limit, 4))
            batch = []
            for _ in range(size):
                u, v = rng.sample(range(n), 2)
                batch.append((u, v, next_weight))
                live.add_edge(u, v, next_weight)
                next_weight += 1
            trace.ops.append(InsertOp(tuple(batch)))
        elif alive:
            eid = rng.choice(alive)
            u, v = live.endpoints(eid)
            matches = sorted(e for x, e in live.incident(u) if x == v)
            live.delete_edge(matches[0])
            trace.ops.append(DeleteOp(u, v))
    return trace


def gen(
    model: Union[str, GraphModel],
    n: int,
    seed: int,
    ops: int,
    out: Union[str, Path],
    insert_ratio: float = 0.25,
) -> Tuple[Path, Path]:
    """Write `<out>.graph` and `<out>.trace`; identical seeds give identical bytes"""
    g = generate_graph(model, n, seed)
    trace = generate_trace(g, ops, seed, insert_ratio)
    base = Path(out)
    graph_path = base.with_name(base.name + ".graph")
    trace_path = base.with_name(base.name + ".trace")
    graph_path.write_text(format_edge_list(g), encoding="utf-8")
    trace_path.write_text(trace.format(), encoding="utf-8")
    logger.info("generated", model=str(GraphModel(model).value), n=n, m=g.num_edges(), ops=len(trace.ops))
    return graph_path, trace_path


# -- engines -----------------------------------------------------------------


class ReplayEngine(Protocol):
    def forest_edges(self) -> Any: ...

    def delete(self, eid: int) -> Any: ...

    def insert_batch(self, edges: Sequence[Tuple[int, int, int, int]]) -> MsfDelta: ...

    def work(self) -> int: ...


class OracleEngine:
    """Kruskal replay, charged one unit per alive edge per update"""

    def __init__(self, g: Graph):
        self.inner = KruskalReplay(g)
        self._work = 0

    def forest_edges(self) -> Any:
        return self.inner.forest_edges()

    def delete(self, eid: int) -> MsfDelta:
        self._work += self.inner.graph.num_edges()
        return self.inner.delete(eid)

    def insert_batch(self, edges: Sequence[Tuple[int, int, int, int]]) -> MsfDelta:
        self._work += self.inner.graph.num_edges() + len(edges)
        return self.inner.insert_batch(edges)

    def work(self) -> int:
        return self._work


class FacadeEngine:
    def __init__(self, g: Graph, recursive: bool):
        factory = None if recursive else multigraph_factory
        self.inner = DynamicMsf(g, factory=factory)

    def forest_edges(self) -> Any:
        return self.inner.forest_edges()

    def delete(self, eid: int) -> MsfDelta:
        return self.inner.delete(eid)

    def insert_batch(self, edges: Sequence[Tuple[int, int, int, int]]) -> MsfDelta:
        return self.inner.insert_batch(edges)

    def work(self) -> int:
        return self.inner.meter.units


class DecrementalEngine:
    """The recursive engine alone; traces with insertions are rejected"""

    def __init__(self, g: Graph):
        self.inner = Engine(g)

    def forest_edges(self) -> Any:
        return self.inner.forest_edges()

    def delete(self, eid: int) -> Union[MsfDelta, Failure]:
        return self.inner.delete(eid)

    def insert_batch(self, edges: Sequence[Tuple[int, int, int, int]]) -> MsfDelta:
        raise InputError("the decremental engine does not accept insertions")

    def work(self) -> int:
        return self.inner.meter.units


def create_engine(choice: Union[str, EngineChoice], g: Graph) -> ReplayEngine:
    """Build the named engine on a private copy of g"""
    choice = EngineChoice(choice)
    if choice is EngineChoice.ORACLE:
        return OracleEngine(g)
    if choice is EngineChoice.DECREMENTAL:
        return DecrementalEngine(g)
    return FacadeEngine(g, recursive=choice is EngineChoice.DYNMSF)


class FaultInjector:
    """
    Wraps an engine and corrupts its forest from step `step` on

    The first update at or after `step` that adds a forest edge has that
    edge replaced by some other alive non-forest edge, or, if none exists,
    simply dropped.
    """

    def __init__(self, inner: ReplayEngine, graph: Graph, step: int):
        self.inner = inner
        self.graph = graph
        self.step = step
        self._steps = 0
        self._swap: Optional[Tuple[int, Optional[int]]] = None

    def forest_edges(self) -> Any:
        forest = set(self.inner.forest_edges())
        if self._swap is not None:
            dropped, fake = self._swap
            forest.discard(dropped)
            if fake is not None:
                forest.add(fake)
        return frozenset(forest)

    def _after(self, delta: Any) -> Any:
        self._steps += 1
        if self._swap is None and self._steps > self.step and isinstance(delta, MsfDelta) and delta.added:
            forest = set(self.inner.forest_edges())
            others = sorted(e for e in self.graph.edges() if e not in forest)
            self._swap = (delta.added[0], others[-1] if others else None)
            logger.info("fault_injected", step=self._steps - 1, dropped=delta.added[0])
        return delta

    def delete(self, eid: int) -> Any:
        return self._after(self.inner.delete(eid))

    def insert_batch(self, edges: Sequence[Tuple[int, int, int, int]]) -> Any:
        return self._after(self.inner.insert_batch(edges))

    def work(self) -> int:
        return self.inner.work()


# -- replay ------------------------------------------------------------------


@dataclass
class Step:
    index: int
    op: str
    eid: Optional[int] = None
    inserted: Tuple[int, ...] = ()


def _resolve_delete(g: Graph, op: DeleteOp, index: int) -> int:
    if not (g.has_node(op.u) and g.has_node(op.v)):
        raise InputError(f"step {index}: unknown node in `{op.line()}`")
    matches = sorted(eid for x, eid in g.incident(op.u) if x == op.v)
    if not matches:
        raise InputError(f"step {index}: `{op.line()}` names no alive edge")
    return matches[0]


def replay(
    g: Graph, trace: UpdateTrace, engine: ReplayEngine, current: Optional[Graph] = None
) -> Iterator[Tuple[Step, Any, Graph]]:
    """
    Drive an engine through a trace

    Yields (step, engine result, current graph) after every record. The
    graph is the harness's own copy (`current`, default a fresh copy of g)
    and assigns the ids of inserted edges.
    """
    if trace.n != g.num_nodes() or trace.m != g.num_edges():
        raise InputError(
            f"trace header ({trace.n}, {trace.m}) does not match graph "
            f"({g.num_nodes()}, {g.num_edges()})"
        )
    if current is None:
        current = g.copy()
    for index, op in enumerate(trace.ops):
        if isinstance(op, DeleteOp):
            eid = _resolve_delete(current, op, index)
            current.delete_edge(eid)
            result = engine.delete(eid)
            yield Step(index, op.line(), eid=eid), result, current
        else:
            records = []
            for u, v, w in op.edges:
                if not (current.has_node(u) and current.has_node(v)):
                    raise InputError(f"step {index}: unknown node in `I {u} {v} {w}`")
                eid = current.add_edge(u, v, w)
                records.append((u, v, w, eid))
            result = engine.insert_batch(records)
            label = op.lines()[0] if len(op.edges) == 1 else f"B {len(op.edges)}"
            yield Step(index, label, inserted=tuple(r[3] for r in records)), result, current


# -- verify ------------------------------------------------------------------


@dataclass
class Divergence:
    step: int
    op: str
    missing: List[int]
    extra: List[int]
    edges: Dict[int, Tuple[int, int, Any]]
    error: Optional[str] = None

    def dump(self) -> str:
        lines = [f"divergence at step {self.step}: {self.op}"]
        if self.error:
            lines.append(f"  error: {self.error}")
        for label, ids in (("missing", self.missing), ("extra", self.extra)):
            for eid in ids:
                u, v, w = self.edges[eid]
                lines.append(f"  {label} edge {eid}: {u} {v} {w}")
        return "\n".join(lines)


@dataclass
class VerifyReport:
    engine: str
    steps: int
    passed_steps: int
    divergence: Optional[Divergence] = None
    restarts: int = 0
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.divergence is None and self.passed_steps == self.steps

    def to_dict(self) -> Dict[str, Any]:
        return {
            "engine": self.engine,
            "passed": self.passed,
            "steps": self.steps,
            "passed_steps": self.passed_steps,
            "failures": self.failures,
            "divergence": None
            if self.divergence is None
            else {
                "step": self.divergence.step,
                "op": self.divergence.op,
                "missing": self.divergence.missing,
                "extra": self.divergence.extra,
                "error": self.divergence.error,
                "dump": self.divergence.dump(),
            },
        }


def verify(
    g: Graph,
    trace: UpdateTrace,
    engine: Union[str, EngineChoice] = EngineChoice.DYNMSF,
    inject_fault: Optional[int] = None,
) -> VerifyReport:
    """
    Replay a trace through an engine and through Kruskal, comparing forests

    Stops at the first step whose forests differ or whose update raised a
    package error; the report then carries a counterexample dump with the
    endpoints and weights of the edges on which the forests disagree.
    """
    choice = EngineChoice(engine)
    candidate: ReplayEngine = create_engine(choice, g)
    oracle = KruskalReplay(g)
    report = VerifyReport(choice.value, len(trace.ops), 0)

    def edge_info(graph: Graph, ids: Iterable[int]) -> Dict[int, Tuple[int, int, Any]]:
        return {eid: graph.endpoints(eid) + (graph.weight(eid),) for eid in ids}

    initial = _diff(candidate.forest_edges(), oracle.forest_edges())
    if initial:
        missing, extra = initial
        report.divergence = Divergence(-1, "initial", missing, extra, edge_info(g, missing + extra))
        return report

    current = g.copy()
    if inject_fault is not None:
        candidate = FaultInjector(candidate, current, inject_fault)
    stream = replay(g, trace, candidate, current)
    index = -1
    try:
        for step, result, current in stream:
            index = step.index
            if step.eid is not None:
                oracle.delete(step.eid)
            else:
                oracle.insert_batch(
                    [current.endpoints(e) + (current.weight(e), e) for e in step.inserted]
                )
            if isinstance(result, Failure):
                report.failures += 1
                report.divergence = Divergence(
                    step.index, step.op, [], [], {}, error=f"engine failure: {result.reason}"
                )
                break
            differs = _diff(candidate.forest_edges(), oracle.forest_edges())
            if differs:
                missing, extra = differs
                report.divergence = Divergence(
                    step.index, step.op, missing, extra, edge_info(current, missing + extra)
                )
                break
            report.passed_steps += 1
    except (DynMsfError, EngineFailure) as e:
        if isinstance(e, InputError) and index < 0:
            raise
        report.divergence = Divergence(index + 1, "update", [], [], {}, error=f"{type(e).__name__}: {e}")

    logger.info(
        "verify_done",
        engine=choice.value,
        passed=report.passed,
        steps=report.steps,
        passed_steps=report.passed_steps,
    )
    return report


def _diff(got: Iterable[int], expected: Iterable[int]) -> Optional[Tuple[List[int], List[int]]]:
    got_set, expected_set = set(got), set(expected)
    if got_set == expected_set:
        return None
    return sorted(expected_set - got_set), sorted(got_set - expected_set)


# -- bench -------------------------------------------------------------------


BENCH_COLUMNS = [
    "step",
    "op",
    "work_units",
    "wall_p50_us",
    "wall_p90_us",
    "wall_max_us",
    "forest_removed",
    "forest_added",
]


def _percentile(samples: Sequence[float], q: float) -> float:
    ordered = sorted(samples)
    if len(ordered) == 1:
        return ordered[0]
    cuts = statistics.quantiles(ordered, n=100, method="inclusive")
    return cuts[max(0, min(98, int(q) - 1))]


def bench(
    g: Graph,
    trace: UpdateTrace,
    engine: Union[str, EngineChoice] = EngineChoice.DYNMSF,
    repetitions: int = 3,
) -> List[Dict[str, Any]]:
    """
    Per-step benchmark rows

    Work units come from the engine's deterministic meters and are taken
    from the first repetition; wall times are percentiles over all
    repetitions, in microseconds.
    """
    if repetitions < 1:
        raise InputError("repetitions must be positive")
    walls: List[List[float]] = [[] for _ in trace.ops]
    rows: List[Dict[str, Any]] = []
    for rep in range(repetitions):
        candidate = create_engine(engine, g)
        last = candidate.work()
        stream = replay(g, trace, candidate)
        while True:
            start = time.perf_counter()
            try:
                step, result, _ = next(stream)
            except StopIteration:
                break
            walls[step.index].append((time.perf_counter() - start) * 1e6)
            units = candidate.work()
            if rep == 0:
                delta = result if isinstance(result, MsfDelta) else MsfDelta()
                rows.append(
                    {
                        "step": step.index,
                        "op": step.op,
                        "work_units": units - last,
                        "forest_removed": len(delta.removed),
                        "forest_added": len(delta.added),
                    }
                )
            last = units
    for row in rows:
        samples = walls[row["step"]]
        row["wall_p50_us"] = round(_percentile(samples, 50), 3)
        row["wall_p90_us"] = round(_percentile(samples, 90), 3)
        row["wall_max_us"] = round(max(samples), 3)
    return rows


def write_bench_csv(rows: Sequence[Dict[str, Any]], out: Union[IO[str], str, Path, None] = None) -> str:
    """Write rows as CSV; an empty row list gives the header alone"""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    text = buffer.getvalue()
    if isinstance(out, (str, Path)):
        Path(out).write_text(text, encoding="utf-8")
    elif out is not None:
        out.write(text)
    return text


def load_inputs(graph_path: Union[str, Path], trace_path: Optional[Union[str, Path]]) -> Tuple[Graph, UpdateTrace]:
    g = read_edge_list(graph_path)
    if trace_path is None:
        return g, UpdateTrace(g.num_nodes(), g.num_edges(), 0)
    return g, read_trace(trace_path)

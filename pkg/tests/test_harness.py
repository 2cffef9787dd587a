"""Tests for trace handling, generation, verification and benchmarking"""

import io

import pytest

from dynmsf.exceptions import InputError
from dynmsf.graph_core import Graph, read_edge_list
from dynmsf.harness import (
    BENCH_COLUMNS,
    DeleteOp,
    InsertOp,
    UpdateTrace,
    bench,
    create_engine,
    gen,
    generate_graph,
    generate_trace,
    parse_trace,
    read_trace,
    replay,
    verify,
    write_bench_csv,
)


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n, i + 1) for i in range(n)])


class TestTraces:
    def test_parse(self):
        text = "# header\n8 8 3\nD 0 1\nI 2 5 9\nB 2\nI 0 4 10\nI 1 6 11\n"
        trace = parse_trace(io.StringIO(text))
        assert (trace.n, trace.m, trace.seed) == (8, 8, 3)
        assert trace.ops == [
            DeleteOp(0, 1),
            InsertOp(((2, 5, 9),)),
            InsertOp(((0, 4, 10), (1, 6, 11))),
        ]

    def test_format_parses_back(self):
        trace = UpdateTrace(
            8, 8, 3, [DeleteOp(0, 1), InsertOp(((2, 5, 9), (3, 7, 10)))]
        )
        assert parse_trace(io.StringIO(trace.format())) == trace

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "8 8\n",
            "8 8 0\nX 1 2\n",
            "8 8 0\nB 2\nI 0 1 5\n",
            "8 8 0\nB 2\nI 0 1 5\nD 1 2\n",
            "8 8 0\nD a b\n",
            "8 8 0\nB 99\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(InputError):
            parse_trace(io.StringIO(text))


class TestGeneration:
    @pytest.mark.parametrize(
        "model,n,m",
        [("random-3-regular", 16, 24), ("cycle", 9, 9), ("barbell", 12, 17)],
    )
    def test_models(self, model, n, m):
        g = generate_graph(model, n, 0)
        assert g.num_nodes() == n
        assert g.num_edges() == m
        assert sorted(g.weight(e) for e in g.edges()) == list(range(1, m + 1))

    @pytest.mark.parametrize(
        "model,n", [("random-3-regular", 7), ("cycle", 2), ("barbell", 5)]
    )
    def test_model_bounds(self, model, n):
        with pytest.raises(InputError):
            generate_graph(model, n, 0)

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            generate_graph("grid", 16, 0)

    def test_gen_is_deterministic(self, tmp_path):
        first = gen("er", 20, 5, 40, tmp_path / "a")
        second = gen("er", 20, 5, 40, tmp_path / "b")
        for left, right in zip(first, second):
            assert left.read_bytes() == right.read_bytes()
        g = read_edge_list(first[0])
        trace = read_trace(first[1])
        assert (trace.n, trace.m, trace.seed) == (20, g.num_edges(), 5)
        assert len(trace.ops) == 40

    def test_deletion_only_trace(self):
        g = generate_graph("random-3-regular", 16, 1)
        trace = generate_trace(g, 20, 1, insert_ratio=0)
        assert all(isinstance(op, DeleteOp) for op in trace.ops)


class TestReplay:
    def test_header_mismatch(self):
        g = cycle(8)
        engine = create_engine("oracle", g)
        with pytest.raises(InputError):
            list(replay(g, UpdateTrace(8, 7, 0, [DeleteOp(0, 1)]), engine))

    def test_unknown_edge(self):
        g = cycle(8)
        engine = create_engine("oracle", g)
        with pytest.raises(InputError):
            list(replay(g, UpdateTrace(8, 8, 0, [DeleteOp(0, 4)]), engine))

    def test_inserted_ids_follow_the_graph(self):
        g = cycle(8)
        engine = create_engine("oracle", g)
        trace = UpdateTrace(8, 8, 0, [InsertOp(((0, 4, 20), (1, 5, 21)))])
        ((step, _, current),) = list(replay(g, trace, engine))
        assert step.inserted == (8, 9)
        assert current.num_edges() == 10


class TestVerify:
    def test_fault_is_caught(self):
        g = cycle(8)
        trace = UpdateTrace(8, 8, 0, [DeleteOp(0, 1)])
        report = verify(g, trace, "oracle", inject_fault=0)
        assert not report.passed
        assert report.divergence.step == 0
        assert report.divergence.missing == [7]
        assert report.divergence.extra == []
        assert "missing edge 7:" in report.divergence.dump()

    @pytest.mark.parametrize("engine", ["oracle", "fewnontree", "dynmsf"])
    def test_engines_pass(self, engine):
        g = generate_graph("random-3-regular", 16, 2)
        trace = generate_trace(g, 30, 2)
        report = verify(g, trace, engine)
        assert report.passed, report.to_dict()
        assert report.to_dict()["passed_steps"] == 30

    def test_decremental_engine(self):
        g = generate_graph("random-3-regular", 16, 3)
        report = verify(g, generate_trace(g, 20, 3, insert_ratio=0), "decremental")
        assert report.passed

    def test_decremental_engine_rejects_insertions(self):
        g = cycle(8)
        trace = UpdateTrace(8, 8, 0, [DeleteOp(0, 1), InsertOp(((0, 4, 20),))])
        report = verify(g, trace, "decremental")
        assert not report.passed
        assert report.divergence.step == 1
        assert "InputError" in report.divergence.error

    @pytest.mark.slow
    def test_recursive_decremental(self, recursive_settings):
        g = generate_graph("random-3-regular", 64, 6)
        report = verify(g, generate_trace(g, 24, 6, insert_ratio=0), "decremental")
        assert report.passed, report.to_dict()


class TestBench:
    def test_empty_trace_gives_header(self):
        g = cycle(8)
        rows = bench(g, UpdateTrace(8, 8, 0), "oracle")
        assert rows == []
        assert write_bench_csv(rows) == ",".join(BENCH_COLUMNS) + "\n"

    def test_one_row_per_step(self, tmp_path):
        g = generate_graph("cycle", 10, 0)
        trace = generate_trace(g, 12, 0)
        rows = bench(g, trace, "fewnontree", repetitions=2)
        assert [row["step"] for row in rows] == list(range(12))
        assert all(row["wall_p50_us"] <= row["wall_max_us"] for row in rows)
        out = tmp_path / "bench.csv"
        text = write_bench_csv(rows, out)
        assert out.read_text() == text
        assert len(text.splitlines()) == 13

    def test_oracle_work_counts_edges(self):
        g = cycle(8)
        rows = bench(g, UpdateTrace(8, 8, 0, [DeleteOp(0, 1)]), "oracle", 1)
        assert rows[0]["work_units"] == 8
        assert rows[0]["forest_removed"] == 1
        assert rows[0]["forest_added"] == 1

    def test_repetitions(self):
        with pytest.raises(InputError):
            bench(cycle(8), UpdateTrace(8, 8, 0), "oracle", 0)

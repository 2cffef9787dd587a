#!/usr/bin/env python3
"""
dynmsf - Command Line Interface
===============================

Copyright (c) 2026 dynmsf developers.

Command line interface for generating workloads, verifying engines against
the Kruskal oracle and benchmarking them.
"""

import argparse
import json
import sys
from typing import Any, Dict, Optional

from rich.console import Console
from rich.table import Table

from . import __version__, get_package_info
from .config import get_settings, load_settings, reset_settings
from .decomposition import dump_hierarchy
from .dynamic_msf import Engine
from .harness import (
    EngineChoice,
    GraphModel,
    VerifyReport,
    bench,
    create_engine,
    gen,
    load_inputs,
    replay,
    verify,
    write_bench_csv,
)
from .logging_setup import configure_logging

console = Console()


def create_parser() -> argparse.ArgumentParser:
    """Create command line argument parser"""

    parser = argparse.ArgumentParser(
        prog="dynmsf",
        description="dynmsf - dynamic minimum spanning forest engines and verification harness",
        epilog="Copyright (c) 2026 dynmsf developers.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"dynmsf v{__version__}")
    parser.add_argument("--config", type=str, help="YAML file merged over the default settings")
    parser.add_argument("--log-level", type=str, help="Log level (DEBUG, INFO, WARNING, ...)")
    parser.add_argument("--json-logs", action="store_true", help="Emit JSON log lines")
    parser.add_argument(
        "--assert-level",
        type=int,
        choices=[0, 1, 2],
        help="Internal invariant checks: 0 off, 1 structural, 2 oracle cross-checks",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Gen command
    gen_parser = subparsers.add_parser("gen", help="Generate a graph file and an update trace")
    gen_parser.add_argument(
        "--model",
        choices=[m.value for m in GraphModel],
        default=None,
        help="Graph model (default from settings)",
    )
    gen_parser.add_argument("--n", type=int, required=True, help="Number of nodes")
    gen_parser.add_argument("--seed", type=int, default=0, help="Random seed")
    gen_parser.add_argument("--ops", type=int, default=0, help="Number of trace records")
    gen_parser.add_argument(
        "--insert-ratio",
        type=float,
        default=0.25,
        help="Probability that a record is an insertion batch",
    )
    gen_parser.add_argument("--out", required=True, help="Output prefix for .graph and .trace")

    # Verify command
    verify_parser = subparsers.add_parser("verify", help="Replay a trace and compare with Kruskal")
    verify_parser.add_argument("graph", help="Graph file (`n m` header, `u v w` lines)")
    verify_parser.add_argument("trace", nargs="?", help="Trace file")
    verify_parser.add_argument(
        "--engine", choices=[e.value for e in EngineChoice], default=EngineChoice.DYNMSF.value
    )
    verify_parser.add_argument(
        "--inject-fault",
        type=int,
        metavar="STEP",
        help="Corrupt the engine's forest at the first replacement from STEP on",
    )
    verify_parser.add_argument(
        "--strict", action="store_true", help="Run with oracle cross-checks inside engines"
    )
    verify_parser.add_argument(
        "--output", choices=["json", "text", "summary"], default="summary", help="Output format"
    )

    # Bench command
    bench_parser = subparsers.add_parser("bench", help="Per-step work units and wall times as CSV")
    bench_parser.add_argument("graph", help="Graph file")
    bench_parser.add_argument("trace", nargs="?", help="Trace file")
    bench_parser.add_argument(
        "--engine", choices=[e.value for e in EngineChoice], default=EngineChoice.DYNMSF.value
    )
    bench_parser.add_argument("--repetitions", type=int, default=3)
    bench_parser.add_argument("--out", help="CSV file (default stdout)")

    # Forest command
    forest_parser = subparsers.add_parser("forest", help="Print the forest after replaying a trace")
    forest_parser.add_argument("graph", help="Graph file")
    forest_parser.add_argument("trace", nargs="?", help="Trace file")
    forest_parser.add_argument(
        "--engine", choices=[e.value for e in EngineChoice], default=EngineChoice.DYNMSF.value
    )
    forest_parser.add_argument(
        "--stats", action="store_true", help="Print the recursive engine's stats snapshot"
    )

    # Hierarchy command
    hierarchy_parser = subparsers.add_parser(
        "hierarchy", help="Dump the MSF hierarchy the recursive engine builds"
    )
    hierarchy_parser.add_argument("graph", help="Graph file")

    # Info command
    subparsers.add_parser("info", help="Display package and configuration information")

    return parser


def apply_global_options(args) -> None:
    """Load settings and logging from the global flags"""

    settings = load_settings(args.config)
    updates: Dict[str, Any] = {}
    if args.assert_level is not None or getattr(args, "strict", False):
        level = 2 if getattr(args, "strict", False) else args.assert_level
        updates["assertions"] = settings.assertions.model_copy(update={"level": level})
    if args.log_level:
        updates["logging"] = settings.logging.model_copy(update={"level": args.log_level})
    if args.json_logs:
        base = updates.get("logging", settings.logging)
        updates["logging"] = base.model_copy(update={"json_output": True})
    if updates:
        settings = settings.model_copy(update=updates)
    reset_settings(settings)
    configure_logging(settings.logging.level, settings.logging.json_output, force=True)


def format_report(report: VerifyReport, output_format: str = "summary") -> str:
    """Format a verification report for output"""

    if output_format == "json":
        return json.dumps(report.to_dict(), indent=2)

    if output_format == "text":
        lines = ["dynmsf verification", "=" * 40]
        lines.append(f"Engine: {report.engine}")
        lines.append(f"Result: {'PASS' if report.passed else 'FAIL'}")
        lines.append(f"Steps: {report.passed_steps}/{report.steps}")
        if report.failures:
            lines.append(f"Engine failures: {report.failures}")
        if report.divergence is not None:
            lines.append("")
            lines.append(report.divergence.dump())
        return "\n".join(lines)

    status = "PASS" if report.passed else "FAIL"
    summary = f"{status} | engine: {report.engine} | steps: {report.passed_steps}/{report.steps}"
    if report.divergence is not None:
        summary += f" | first divergence at step {report.divergence.step}"
    return summary


def cmd_gen(args) -> None:
    """Handle gen command"""

    model = args.model or get_settings().harness.default_model
    graph_path, trace_path = gen(model, args.n, args.seed, args.ops, args.out, args.insert_ratio)
    print(f"graph: {graph_path}")
    print(f"trace: {trace_path}")


def cmd_verify(args) -> int:
    """Handle verify command; returns the exit status"""

    g, trace = load_inputs(args.graph, args.trace)
    report = verify(g, trace, args.engine, inject_fault=args.inject_fault)
    print(format_report(report, args.output))
    return 0 if report.passed else 1


def cmd_bench(args) -> None:
    """Handle bench command"""

    g, trace = load_inputs(args.graph, args.trace)
    rows = bench(g, trace, args.engine, args.repetitions)
    if args.out:
        write_bench_csv(rows, args.out)
    else:
        write_bench_csv(rows, sys.stdout)


def cmd_forest(args) -> None:
    """Handle forest command"""

    g, trace = load_inputs(args.graph, args.trace)
    engine = create_engine(args.engine, g)
    for _ in replay(g, trace, engine):
        pass
    for eid in sorted(engine.forest_edges()):
        print(eid)
    if args.stats:
        inner = getattr(engine, "inner", None)
        if isinstance(inner, Engine):
            print(json.dumps(inner.stats(), indent=2))
        else:
            print(json.dumps({"engine": args.engine, "work_units": engine.work()}, indent=2))


def cmd_hierarchy(args) -> None:
    """Handle hierarchy command"""

    g, _ = load_inputs(args.graph, None)
    engine = Engine(g)
    if engine.hierarchy is None:
        print(f"# base case: {engine.ranked.num_edges()} edges at or below the threshold")
        return
    print(dump_hierarchy(engine.hierarchy), end="")


def cmd_info(args) -> None:
    """Handle info command"""

    table = Table(title="dynmsf")
    table.add_column("Key")
    table.add_column("Value")
    for key, value in get_package_info().items():
        table.add_row(key.replace("_", " ").title(), str(value))
    console.print(table)

    settings = get_settings()
    config_table = Table(title="Configuration")
    config_table.add_column("Section")
    config_table.add_column("Setting")
    config_table.add_column("Value")
    for section, values in settings.model_dump().items():
        if isinstance(values, dict):
            for name, value in values.items():
                config_table.add_row(section, name, str(value))
        else:
            config_table.add_row("", section, str(values))
    console.print(config_table)


def main(argv: Optional[list] = None) -> None:
    """Main CLI entry point"""

    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return

    try:
        apply_global_options(args)
        status = 0
        if args.command == "gen":
            cmd_gen(args)
        elif args.command == "verify":
            status = cmd_verify(args)
        elif args.command == "bench":
            cmd_bench(args)
        elif args.command == "forest":
            cmd_forest(args)
        elif args.command == "hierarchy":
            cmd_hierarchy(args)
        elif args.command == "info":
            cmd_info(args)
        else:
            print(f"Unknown command: {args.command}")
            sys.exit(1)
        if status:
            sys.exit(status)

    except KeyboardInterrupt:
        print("\ndynmsf interrupted")
        sys.exit(1)
    except Exception as e:
        print(f"Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()

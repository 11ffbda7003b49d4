#!/usr/bin/env python3
"""
RFSMC CLI

Typer/Rich-powered command-line interface: verify a program file, count its
Mazurkiewicz traces, and generate or sweep the built-in benchmarks.

Exit status: 0 all executions safe, 1 bug found, 2 usage or validation
error, 3 budget exhausted.
"""

import uuid
from contextlib import nullcontext
from pathlib import Path
from typing import List, Optional

import click
import typer
from rich.console import Console

from RFSMC.bench.generators import BENCHMARKS, generate, mpi_any
from RFSMC.bench.sweep import rows_to_csv, run_sweep, summarize
from RFSMC.ctsearch.critical import CriticalTransitionSearch
from RFSMC.dsl.emitter import emit_program
from RFSMC.dsl.parser import parse_file
from RFSMC.explorer.explorer import FAULTY, Explorer
from RFSMC.explorer.stats import Budget, Outcome
from RFSMC.explorer.strategy import Strategy
from RFSMC.model.program import Program
from RFSMC.model.simulator import RunOutcome
from RFSMC.oracle.brute_force import class_search
from RFSMC.reports.documents import StatsDocument, VerdictDocument
from RFSMC.reports.formatter import bench_table, ct_lines, print_lines, stats_lines, sweep_table, verdict_lines
from RFSMC.shared.errors import (
    EXIT_BUG,
    EXIT_EXHAUSTED,
    EXIT_SAFE,
    EXIT_USAGE,
    InternalError,
    OptimalityViolation,
    RFSMCError,
    format_user_error,
    map_to_exit_code,
    report_error,
)
from RFSMC.shared.logger import CheckerLogger
from RFSMC.shared.profiling_utils import profile_block
from RFSMC.shared.settings import get_settings
from RFSMC.wakeup.tree import render_tree


console = Console()
err_console = Console(stderr=True)

app = typer.Typer(help="RFS ODPOR stateless model checker", add_completion=False, no_args_is_help=True)
bench_app = typer.Typer(help="Benchmark generators and seed sweeps", no_args_is_help=True)
app.add_typer(bench_app, name="bench")

OUTCOME_EXIT = {
    Outcome.ALL_SAFE: EXIT_SAFE,
    Outcome.DEADLOCK: EXIT_BUG,
    Outcome.CRASH: EXIT_BUG,
    Outcome.EXHAUSTED: EXIT_EXHAUSTED,
}


def _fail(error: Exception, run_id: Optional[str] = None) -> None:
    """Print a user-facing message and exit with the mapped status."""
    if isinstance(error, (InternalError, OptimalityViolation)):
        report_error(error, run_id=run_id, component="cli")
    err_console.print(f"[bold red]error:[/bold red] {format_user_error(error, include_details=True)}", highlight=False)
    raise typer.Exit(code=map_to_exit_code(error))


def _load(file: Path) -> Program:
    try:
        return parse_file(str(file))
    except (OSError, RFSMCError) as exc:
        _fail(exc)


def _strategy(name: Optional[str], seed: Optional[int]) -> Strategy:
    settings = get_settings().exploration
    try:
        return Strategy.parse(name or settings.strategy, settings.seed if seed is None else seed)
    except ValueError as exc:
        _fail(exc)


def _budget(max_traces: Optional[int], max_states: Optional[int], timeout_s: Optional[float]) -> Budget:
    settings = get_settings().exploration
    return Budget(
        max_traces=max_traces if max_traces is not None else settings.max_traces,
        max_states=max_states if max_states is not None else settings.max_states,
        timeout_s=timeout_s if timeout_s is not None else settings.timeout_s,
    )


def _check_format(output_format: str) -> None:
    if output_format not in ("text", "json"):
        _fail(ValueError(f"unknown format '{output_format}', expected text or json"))


@app.command("verify")
def verify_command(
    file: Path = typer.Argument(..., help="Program file to check."),
    strategy: Optional[str] = typer.Option(None, "--strategy", "-s", help="dfs, uniform-dfs, rfs-step or rfs-branch."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the randomised strategies."),
    exhaustive: bool = typer.Option(False, "--exhaustive", help="Keep exploring after the first bug."),
    ct: bool = typer.Option(False, "--ct", help="Locate the critical transition of the first bug."),
    max_traces: Optional[int] = typer.Option(None, "--max-traces", help="Stop after this many maximal executions."),
    max_states: Optional[int] = typer.Option(None, "--max-states", help="Stop after this many visited states."),
    timeout_s: Optional[float] = typer.Option(None, "--timeout-s", help="Wall-clock limit in seconds."),
    output_format: str = typer.Option("text", "--format", help="text or json."),
    no_gc: bool = typer.Option(False, "--no-gc", help="Keep the whole exploration tree in memory."),
    dump_tree: bool = typer.Option(False, "--dump-tree", help="Print the exploration tree (implies --no-gc)."),
) -> None:
    """Explore a program and report the verdict."""
    _check_format(output_format)
    settings = get_settings()
    program = _load(file)
    chosen = _strategy(strategy, seed)
    run_id = str(uuid.uuid4())
    explorer = Explorer(
        program,
        strategy=chosen,
        budget=_budget(max_traces, max_states, timeout_s),
        stop_on=() if exhaustive else FAULTY,
        gc_enabled=settings.exploration.gc_enabled and not (no_gc or dump_tree),
        record_traces=ct,
        record_transcript=False,
        run_id=run_id,
    )

    profiling = settings.observability.profiling
    profiler = (
        profile_block(f"verify_{file.stem}", profiling.output_directory, stream=err_console.file)
        if profiling.enabled
        else nullcontext()
    )
    report = None
    try:
        with profiler:
            verdict = explorer.run()
            if ct and verdict.counterexample is not None:
                search = CriticalTransitionSearch(
                    program,
                    strategy=chosen,
                    budget=Budget(max_traces=settings.ct.max_traces_per_prefix, timeout_s=settings.ct.timeout_s),
                    run_id=run_id,
                )
                report = search.search(verdict.counterexample, verdict)
    except RFSMCError as exc:
        _fail(exc, run_id)

    document = VerdictDocument.build(program, verdict, chosen.name, chosen.seed, report)
    if output_format == "json":
        typer.echo(document.model_dump_json(indent=2))
    else:
        print_lines(console, verdict_lines(document))
        if report is not None:
            print_lines(console, ct_lines(program, report))
        if dump_tree:
            print_lines(console, render_tree(explorer.root, program.actor_names).splitlines())
    raise typer.Exit(code=OUTCOME_EXIT[verdict.outcome])


@app.command("count-traces")
def count_traces_command(
    file: Path = typer.Argument(..., help="Program file to count."),
    oracle: bool = typer.Option(False, "--oracle", help="Count with the brute-force oracle instead of the explorer."),
    strategy: Optional[str] = typer.Option(None, "--strategy", "-s", help="Explorer strategy."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Explorer seed."),
    max_traces: Optional[int] = typer.Option(None, "--max-traces", help="Explorer trace budget."),
    timeout_s: Optional[float] = typer.Option(None, "--timeout-s", help="Explorer wall-clock limit."),
    output_format: str = typer.Option("text", "--format", help="text or json."),
) -> None:
    """Count the Mazurkiewicz traces of a program's maximal executions."""
    _check_format(output_format)
    settings = get_settings()
    program = _load(file)
    run_id = str(uuid.uuid4())

    if oracle:
        try:
            classes, prefixes = class_search(program, settings.oracle.max_prefix_classes)
        except RFSMCError as exc:
            _fail(exc, run_id)
        outcome = Outcome.ALL_SAFE
        for key in sorted(classes):
            if classes[key] is not RunOutcome.SAFE:
                outcome = Outcome.of(classes[key])
                break
        document = StatsDocument(
            traces_explored=len(classes),
            states_visited=prefixes + 1,
            verdict=outcome.value,
        )
        CheckerLogger("oracle", run_id).log("oracle_enumeration_finished", document.model_dump())
    else:
        explorer = Explorer(
            program,
            strategy=_strategy(strategy, seed),
            budget=_budget(max_traces, None, timeout_s),
            gc_enabled=settings.exploration.gc_enabled,
            record_traces=False,
            record_transcript=False,
            run_id=run_id,
        )
        try:
            verdict = explorer.run()
        except RFSMCError as exc:
            _fail(exc, run_id)
        outcome = verdict.outcome
        document = StatsDocument.from_stats(verdict.stats, outcome)

    if output_format == "json":
        typer.echo(document.model_dump_json(indent=2))
    else:
        print_lines(console, stats_lines(document))
    raise typer.Exit(code=OUTCOME_EXIT[outcome])


@bench_app.command("list")
def bench_list_command() -> None:
    """List the benchmark generators and their scale parameter."""
    console.print(bench_table(BENCHMARKS[name] for name in sorted(BENCHMARKS)))


@bench_app.command("emit")
def bench_emit_command(
    name: str = typer.Argument(..., help="Benchmark name (see 'bench list')."),
    scale: Optional[int] = typer.Option(None, "--scale", "-k", help="Scale parameter; defaults per benchmark."),
    pad: int = typer.Option(0, "--pad", help="Local steps after each send (mpi_any only)."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write the program here instead of stdout."),
) -> None:
    """Write a generated benchmark as a program file."""
    try:
        spec = BENCHMARKS.get(name)
        value = scale if scale is not None else (spec.default_scale if spec else 0)
        if pad and name != "mpi_any":
            raise ValueError("--pad only applies to mpi_any")
        program = mpi_any(value, pad) if name == "mpi_any" else generate(name, value)
    except (ValueError, RFSMCError) as exc:
        _fail(exc)

    text = emit_program(program)
    if output is None:
        typer.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")
        err_console.print(f"wrote {output}", highlight=False)


@bench_app.command("sweep")
def bench_sweep_command(
    name: str = typer.Argument(..., help="Benchmark name, or a program file path."),
    scale: Optional[int] = typer.Option(None, "--scale", "-k", help="Scale parameter; defaults per benchmark."),
    seeds: Optional[int] = typer.Option(None, "--seeds", help="Seeds per strategy (0 .. seeds-1)."),
    strategies: Optional[str] = typer.Option(None, "--strategies", help="Comma-separated strategy names."),
    max_states: Optional[int] = typer.Option(None, "--max-states", help="Per-run state budget."),
    timeout_s: Optional[float] = typer.Option(None, "--timeout-s", help="Per-run wall-clock limit."),
    workers: Optional[int] = typer.Option(None, "--workers", help="Parallel explorations."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write CSV rows here instead of stdout."),
) -> None:
    """Explore a benchmark under many seeds and report states before the first bug."""
    settings = get_settings()
    if name in BENCHMARKS:
        value = scale if scale is not None else BENCHMARKS[name].default_scale
        try:
            program = generate(name, value)
        except ValueError as exc:
            _fail(exc)
    else:
        program = _load(Path(name))

    names: List[str] = (
        [item.strip() for item in strategies.split(",") if item.strip()] if strategies else list(settings.sweep.strategies)
    )
    for strategy_name in names:
        _strategy(strategy_name, 0)
    count = seeds if seeds is not None else settings.sweep.seeds
    if count < 1:
        _fail(ValueError("--seeds must be at least 1"))

    rows = run_sweep(
        program,
        names,
        range(count),
        budget=Budget(max_states=max_states, timeout_s=timeout_s if timeout_s is not None else settings.exploration.timeout_s),
        max_workers=workers if workers is not None else settings.sweep.max_workers,
    )
    csv_text = rows_to_csv(rows)
    if output is None:
        typer.echo(csv_text, nl=False)
    else:
        output.write_text(csv_text, encoding="utf-8")
        console.print(sweep_table(summarize(rows), title=f"{name} states before first bug"))


def main(argv: Optional[List[str]] = None) -> int:
    """Entrypoint used by `python -m RFSMC` and the console script."""
    try:
        result = app(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_SAFE


if __name__ == "__main__":
    raise SystemExit(main())

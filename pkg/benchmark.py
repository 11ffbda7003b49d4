#!/usr/bin/env python3
"""
Benchmark runner for the RFSMC model checker.

Subcommands:
  - scaling: states explored before the first bug, per strategy and scale,
    over many seeds (the bug-finding study)
  - exhaustive: full exploration of a benchmark, traces, states, tree memory
    with garbage collection on and off
  - compare: compare the medians of two saved scaling results

Examples:
  python benchmark.py scaling --bench mpi_any --scales 0 1 2 3 --seeds 100
  python benchmark.py scaling --bench philosophers_semaphore --scales 2 3 --output artifacts/phil.json
  python benchmark.py exhaustive --bench factorial --scales 5 6 7
  python benchmark.py compare artifacts/base.json artifacts/new.json
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from RFSMC.bench.generators import BENCHMARKS, generate
from RFSMC.bench.sweep import run_sweep, summarize
from RFSMC.explorer.explorer import explore
from RFSMC.explorer.stats import Budget
from RFSMC.explorer.strategy import Strategy
from RFSMC.shared.settings import STRATEGY_NAMES, get_settings


# ----------------------------
# Bug-finding scaling study
# ----------------------------

def run_scaling_benchmark(
    bench: str,
    scales: Sequence[int],
    seeds: int,
    strategies: Sequence[str],
    max_states: Optional[int],
    timeout_s: Optional[float],
    workers: int,
    output_file: Optional[str] = None,
) -> Dict:
    """Sweep seeds for every (scale, strategy) and summarise states before the first bug."""
    print(f"Scaling benchmark: {bench}, scales {list(scales)}, {seeds} seeds")
    print(f"Strategies: {', '.join(strategies)}")
    print("-" * 72)

    results: Dict = {
        "timestamp": time.strftime("%Y-%m-%d %H:%M:%S"),
        "bench": bench,
        "seeds": seeds,
        "scales": {},
    }
    for scale in scales:
        program = generate(bench, scale)
        started = time.time()
        rows = run_sweep(
            program,
            strategies,
            range(seeds),
            budget=Budget(max_states=max_states, timeout_s=timeout_s),
            max_workers=workers,
        )
        elapsed = time.time() - started
        summaries = [summary.to_dict() for summary in summarize(rows)]
        results["scales"][str(scale)] = {"elapsed_s": round(elapsed, 2), "strategies": summaries}

        print(f"\nscale={scale}  ({program.num_actors} actors, {program.statement_count} statements, {elapsed:.1f}s)")
        print(f"{'Strategy':<12} {'Runs':>5} {'Exhausted':>10} {'Q1':>10} {'Median':>10} {'Q3':>10}")
        for summary in summaries:
            print(
                f"{summary['strategy']:<12} {summary['runs']:>5} {summary['exhausted']:>10} "
                f"{summary['q1']:>10.1f} {summary['median']:>10.1f} {summary['q3']:>10.1f}"
            )

    if output_file:
        output_path = Path(output_file)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as handle:
            json.dump(results, handle, indent=2)
        print(f"\nResults saved to: {output_file}")

    return results


# ----------------------------
# Exhaustive exploration and tree memory
# ----------------------------

def run_exhaustive_benchmark(bench: str, scales: Sequence[int], strategy: str, timeout_s: Optional[float]) -> List[Dict]:
    """Explore every class; report traces, states and tree size with and without GC."""
    print(f"Exhaustive benchmark: {bench}, strategy {strategy}")
    print("-" * 72)
    print(f"{'Scale':>5} {'GC':>4} {'Verdict':>10} {'Traces':>10} {'States':>10} {'Peak nodes':>11} {'Time':>9}")

    rows = []
    for scale in scales:
        program = generate(bench, scale)
        for gc_enabled in (True, False):
            verdict = explore(
                program,
                strategy=Strategy.parse(strategy, 0),
                budget=Budget(timeout_s=timeout_s),
                gc_enabled=gc_enabled,
            )
            stats = verdict.stats
            rows.append({"scale": scale, "gc": gc_enabled, "verdict": verdict.outcome.value, **stats.to_dict()})
            print(
                f"{scale:>5} {'on' if gc_enabled else 'off':>4} {verdict.outcome.value:>10} "
                f"{stats.traces_explored:>10} {stats.states_visited:>10} {stats.peak_tree_nodes:>11} "
                f"{stats.wall_time_s:>8.2f}s"
            )
    return rows


def compare_results(baseline_file: str, candidate_file: str) -> None:
    """Compare per-strategy medians of two scaling results."""
    with open(baseline_file, encoding="utf-8") as handle:
        baseline = json.load(handle)
    with open(candidate_file, encoding="utf-8") as handle:
        candidate = json.load(handle)

    print("=" * 60)
    print("SCALING COMPARISON")
    print("=" * 60)
    print(f"Baseline:  {baseline_file}")
    print(f"Candidate: {candidate_file}")
    print()
    print(f"{'Scale':>5} {'Strategy':<12} {'Baseline':>10} {'Candidate':>10} {'Change':>9}")
    print("-" * 50)

    for scale, entry in baseline.get("scales", {}).items():
        other = candidate.get("scales", {}).get(scale)
        if other is None:
            continue
        medians = {row["strategy"]: row["median"] for row in other["strategies"]}
        for row in entry["strategies"]:
            if row["strategy"] not in medians:
                continue
            base_val = row["median"]
            new_val = medians[row["strategy"]]
            pct = (base_val - new_val) / base_val * 100 if base_val > 0 else 0.0
            print(f"{scale:>5} {row['strategy']:<12} {base_val:>10.1f} {new_val:>10.1f} {pct:>8.1f}%")


def _build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(description="RFSMC benchmark runner")
    subparsers = parser.add_subparsers(dest="command", required=True)

    scaling = subparsers.add_parser("scaling", help="States before the first bug per strategy and scale")
    scaling.add_argument("--bench", default="mpi_any", choices=sorted(BENCHMARKS))
    scaling.add_argument("--scales", type=int, nargs="+", default=[0, 1, 2])
    scaling.add_argument("--seeds", type=int, default=settings.sweep.seeds)
    scaling.add_argument("--strategies", nargs="+", default=list(settings.sweep.strategies), choices=STRATEGY_NAMES)
    scaling.add_argument("--max-states", type=int, default=None)
    scaling.add_argument("--timeout-s", type=float, default=settings.exploration.timeout_s)
    scaling.add_argument("--workers", type=int, default=settings.sweep.max_workers)
    scaling.add_argument("--output", default=None, help="Save results as JSON")

    exhaustive = subparsers.add_parser("exhaustive", help="Full exploration with GC on and off")
    exhaustive.add_argument("--bench", default="factorial", choices=sorted(BENCHMARKS))
    exhaustive.add_argument("--scales", type=int, nargs="+", default=[4, 5, 6])
    exhaustive.add_argument("--strategy", default="dfs", choices=STRATEGY_NAMES)
    exhaustive.add_argument("--timeout-s", type=float, default=settings.exploration.timeout_s)

    compare = subparsers.add_parser("compare", help="Compare two saved scaling results")
    compare.add_argument("baseline")
    compare.add_argument("candidate")
    return parser


def main() -> None:
    parser = _build_parser()
    args = parser.parse_args()

    if args.command == "scaling":
        run_scaling_benchmark(
            bench=args.bench,
            scales=args.scales,
            seeds=args.seeds,
            strategies=args.strategies,
            max_states=args.max_states,
            timeout_s=args.timeout_s,
            workers=args.workers,
            output_file=args.output,
        )
        return

    if args.command == "exhaustive":
        run_exhaustive_benchmark(args.bench, args.scales, args.strategy, args.timeout_s)
        return

    if args.command == "compare":
        if not Path(args.baseline).exists() or not Path(args.candidate).exists():
            print("Error: both result files must exist", file=sys.stderr)
            sys.exit(1)
        compare_results(args.baseline, args.candidate)
        return

    parser.error("Unknown command")


if __name__ == "__main__":
    main()

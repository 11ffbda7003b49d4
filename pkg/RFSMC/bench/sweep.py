"""Seed sweeps: the same program explored under many (strategy, seed) pairs.

Each exploration stops at the first bug. Rows carry states_before_first_bug
for box-plot style aggregation; exhausted runs report the states explored
before the budget ran out.
"""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from RFSMC.explorer.explorer import FAULTY, Explorer
from RFSMC.explorer.stats import Budget, Outcome
from RFSMC.explorer.strategy import Strategy
from RFSMC.model.program import Program
from RFSMC.shared.logger import CheckerLogger


class SweepRow(BaseModel):
    seed: int
    strategy: str
    states_before_first_bug: int
    verdict: str


@dataclass
class StrategySummary:
    strategy: str
    runs: int
    exhausted: int
    median: float
    q1: float
    q3: float
    minimum: int
    maximum: int

    def to_dict(self) -> Dict:
        return {
            "strategy": self.strategy,
            "runs": self.runs,
            "exhausted": self.exhausted,
            "median": round(self.median, 2),
            "q1": round(self.q1, 2),
            "q3": round(self.q3, 2),
            "min": self.minimum,
            "max": self.maximum,
        }


def run_one(program: Program, strategy: Strategy, budget: Optional[Budget] = None, logger: Optional[CheckerLogger] = None) -> SweepRow:
    explorer = Explorer(
        program,
        strategy=strategy,
        budget=budget,
        stop_on=FAULTY,
        record_traces=False,
        record_transcript=False,
        logger=logger,
    )
    verdict = explorer.run()
    states = verdict.stats.states_before_first_bug
    if states is None:
        states = verdict.stats.states_visited
    return SweepRow(seed=strategy.seed, strategy=strategy.name, states_before_first_bug=states, verdict=verdict.outcome.value)


def run_sweep(
    program: Program,
    strategies: Sequence[str],
    seeds: Sequence[int],
    budget: Optional[Budget] = None,
    max_workers: int = 1,
    run_id: Optional[str] = None,
) -> List[SweepRow]:
    """Explore program once per (strategy, seed); rows sorted by strategy order then seed."""
    logger = CheckerLogger("sweep", run_id)
    jobs = [Strategy.parse(name, seed) for name in strategies for seed in seeds]

    def job(strategy: Strategy) -> SweepRow:
        row = run_one(program, strategy, budget, logger)
        logger.debug("sweep_row", row.model_dump())
        return row

    if max_workers <= 1:
        rows = [job(strategy) for strategy in jobs]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            rows = list(executor.map(job, jobs))

    order = {name: position for position, name in enumerate(strategies)}
    return sorted(rows, key=lambda row: (order[row.strategy], row.seed))


def summarize(rows: Sequence[SweepRow]) -> List[StrategySummary]:
    """Median and quartiles of states_before_first_bug per strategy."""
    grouped: Dict[str, List[SweepRow]] = {}
    for row in rows:
        grouped.setdefault(row.strategy, []).append(row)

    summaries = []
    for strategy, members in grouped.items():
        values = np.array([row.states_before_first_bug for row in members], dtype=float)
        q1, median, q3 = np.percentile(values, [25, 50, 75])
        summaries.append(StrategySummary(
            strategy=strategy,
            runs=len(members),
            exhausted=sum(1 for row in members if row.verdict == Outcome.EXHAUSTED.value),
            median=float(median),
            q1=float(q1),
            q3=float(q3),
            minimum=int(values.min()),
            maximum=int(values.max()),
        ))
    return summaries


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["seed", "strategy", "states_before_first_bug", "verdict"])
    for row in rows:
        writer.writerow([row.seed, row.strategy, row.states_before_first_bug, row.verdict])
    return buffer.getvalue()

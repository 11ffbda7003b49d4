"""
Tests for the RFS ODPOR explorer.

The brute-force oracle is the reference: every strategy must explore exactly
one execution per Mazurkiewicz class, with no sleep-set blocked nodes.
"""

import unittest

import pytest

from RFSMC.bench.generators import (
    all_faulty,
    busy_wait,
    factorial_bench,
    four_actor_deadlock,
    mpi_any,
    philosophers_mutex,
    philosophers_semaphore,
    random_program,
)
from RFSMC.bench.sweep import run_sweep, summarize
from RFSMC.explorer.explorer import Explorer, explore, transcript
from RFSMC.explorer.stats import Budget, Outcome
from RFSMC.explorer.strategy import Strategy, StrategyPolicy, StrategyRunner
from RFSMC.model.program import ProgramBuilder
from RFSMC.model.simulator import RunOutcome, Simulator
from RFSMC.oracle.brute_force import class_keys
from RFSMC.shared.settings import STRATEGY_NAMES
from RFSMC.wakeup.tree import ExpHeads, ExplorationNode

P1, P2, P3 = 0, 1, 2


def safe_handoff():
    builder = ProgramBuilder()
    builder.mailbox("m")
    builder.semaphore("s", 1)
    builder.actor("P1").acquire("s").send("m", var="out").release("s").wait("out")
    builder.actor("P2").recv("m", source="P1", var="x").wait("x")
    return builder.build()


ORACLE_PROGRAMS = [
    pytest.param(mpi_any(0), id="mpi_any0"),
    pytest.param(mpi_any(1), id="mpi_any1"),
    pytest.param(mpi_any(0, pad=2), id="mpi_any0_pad2"),
    pytest.param(philosophers_mutex(2), id="philosophers_mutex2"),
    pytest.param(philosophers_semaphore(2), id="philosophers_semaphore2"),
    pytest.param(busy_wait(1), id="busy_wait1"),
    pytest.param(four_actor_deadlock(), id="four_actor_deadlock"),
    pytest.param(factorial_bench(3), id="factorial3"),
    pytest.param(safe_handoff(), id="safe_handoff"),
]

RANDOM_PROGRAMS = [pytest.param(random_program(seed), id=f"random{seed}") for seed in range(20)]


def run_exhaustive(program, strategy, gc_enabled=True):
    explorer = Explorer(program, strategy=strategy, gc_enabled=gc_enabled)
    return explorer.run()


def assert_matches_oracle(program, verdict, classes):
    assert verdict.stats.ssb_count == 0
    assert verdict.stats.traces_explored == len(classes)
    keys = [trace.key for trace in verdict.traces]
    assert len(keys) == len(set(keys))
    assert set(keys) == set(classes)
    for trace in verdict.traces:
        assert classes[trace.key] is trace.outcome


class TestOracleAgreement:
    """Explored trace keys equal the oracle's class keys for every strategy."""

    @pytest.mark.parametrize("program", ORACLE_PROGRAMS)
    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    @pytest.mark.parametrize("seed", [0, 1])
    def test_benchmarks(self, program, name, seed):
        verdict = run_exhaustive(program, Strategy.parse(name, seed))
        assert_matches_oracle(program, verdict, class_keys(program))

    @pytest.mark.parametrize("program", RANDOM_PROGRAMS)
    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_random_programs(self, program, name):
        classes = class_keys(program)
        for seed in (0, 7):
            verdict = run_exhaustive(program, Strategy.parse(name, seed))
            assert_matches_oracle(program, verdict, classes)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_many_random_programs(self, name):
        for program_seed in range(20, 220):
            program = random_program(program_seed)
            classes = class_keys(program)
            for seed in range(5):
                verdict = run_exhaustive(program, Strategy.parse(name, seed))
                assert_matches_oracle(program, verdict, classes)


class TestTraceCounts:
    """n independent-looking senders on one mailbox give n! classes."""

    @pytest.mark.parametrize("n,expected", [(1, 1), (3, 6), (4, 24), (5, 120), (6, 720)])
    def test_factorial(self, n, expected):
        verdict = explore(factorial_bench(n))
        assert verdict.outcome is Outcome.ALL_SAFE
        assert verdict.stats.traces_explored == expected

    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_factorial_every_strategy(self, name):
        verdict = explore(factorial_bench(4), strategy=Strategy.parse(name, 3))
        assert verdict.stats.traces_explored == 24

    @pytest.mark.slow
    def test_factorial_seven(self):
        verdict = explore(factorial_bench(7))
        assert verdict.stats.traces_explored == 5040

    def test_mpi_any_classes(self):
        verdict = explore(mpi_any(0))
        assert verdict.stats.traces_explored == 4
        outcomes = sorted(trace.outcome.value for trace in verdict.traces)
        assert outcomes == ["Deadlock", "Deadlock", "Safe", "Safe"]
        # exhaustive runs still report the first bug
        assert verdict.outcome is Outcome.DEADLOCK
        assert verdict.stopped_on is None


class TestBugFinding(unittest.TestCase):
    """Tests for stopping at the first deadlock."""

    def test_mpi_any_deadlock_replays(self):
        program = mpi_any(0)
        for name in STRATEGY_NAMES:
            for seed in range(5):
                verdict = explore(program, strategy=Strategy.parse(name, seed), stop_at_first_bug=True)
                self.assertIs(verdict.outcome, Outcome.DEADLOCK)
                counterexample = verdict.counterexample
                self.assertIsNotNone(counterexample)
                self.assertIs(Simulator(program).classify(counterexample), RunOutcome.DEADLOCK)
                # P2's message was matched first
                self.assertLess(counterexample.actors.index(P2), counterexample.actors.index(P1))
                self.assertIsNotNone(verdict.stats.states_before_first_bug)
                self.assertEqual(verdict.stopped_on, counterexample)

    def test_safe_program(self):
        verdict = explore(safe_handoff(), stop_at_first_bug=True)
        self.assertIs(verdict.outcome, Outcome.ALL_SAFE)
        self.assertIsNone(verdict.counterexample)
        self.assertIsNone(verdict.stats.states_before_first_bug)

    def test_crash(self):
        verdict = explore(all_faulty(2), stop_at_first_bug=True)
        self.assertIs(verdict.outcome, Outcome.CRASH)
        self.assertIs(verdict.counterexample_outcome, RunOutcome.CRASH)

    def test_sleep_sets_along_counterexample(self):
        verdict = explore(mpi_any(0), stop_at_first_bug=True)
        self.assertEqual(len(verdict.counterexample_sleeps), len(verdict.counterexample) + 1)


class TestBudgets(unittest.TestCase):
    def test_trace_budget(self):
        verdict = explore(factorial_bench(4), budget=Budget(max_traces=1))
        self.assertIs(verdict.outcome, Outcome.EXHAUSTED)
        self.assertEqual(verdict.stats.traces_explored, 1)
        self.assertTrue(verdict.stats.budget_exhausted)

    def test_state_budget(self):
        verdict = explore(factorial_bench(4), budget=Budget(max_states=3))
        self.assertIs(verdict.outcome, Outcome.EXHAUSTED)
        self.assertLessEqual(verdict.stats.states_visited, 4)


class TestDeterminismAndMemory(unittest.TestCase):
    """Same seed, same run; garbage collection changes memory only."""

    def test_same_seed_same_transcript(self):
        program = philosophers_mutex(2)
        for name in ("uniform-dfs", "rfs-step", "rfs-branch"):
            first = explore(program, strategy=Strategy.parse(name, 11))
            second = explore(program, strategy=Strategy.parse(name, 11))
            self.assertEqual(transcript(first), transcript(second))
            first_stats = first.stats.to_dict()
            second_stats = second.stats.to_dict()
            first_stats.pop("wall_time_s")
            second_stats.pop("wall_time_s")
            self.assertEqual(first_stats, second_stats)

    def test_gc_does_not_change_classes(self):
        for program in (mpi_any(1), philosophers_semaphore(2), random_program(3)):
            for name in STRATEGY_NAMES:
                strategy = Strategy.parse(name, 2)
                with_gc = run_exhaustive(program, strategy, gc_enabled=True)
                without_gc = run_exhaustive(program, strategy, gc_enabled=False)
                self.assertEqual(with_gc.explored_keys(), without_gc.explored_keys())
                self.assertEqual(with_gc.stats.traces_explored, without_gc.stats.traces_explored)

    def test_gc_lowers_peak_tree_size(self):
        for program in (philosophers_mutex(3), factorial_bench(5)):
            with_gc = run_exhaustive(program, Strategy(), gc_enabled=True)
            without_gc = run_exhaustive(program, Strategy(), gc_enabled=False)
            self.assertEqual(without_gc.stats.peak_tree_nodes, without_gc.stats.states_visited)
            self.assertLess(with_gc.stats.peak_tree_nodes, without_gc.stats.peak_tree_nodes)

    def test_gc_empties_tree_after_exhaustive_run(self):
        verdict = run_exhaustive(factorial_bench(5), Strategy(), gc_enabled=True)
        self.assertEqual(verdict.stats.final_tree_nodes, 0)


class TestTranscript(unittest.TestCase):
    """Tests for the deterministic dfs transcript of mpi_any."""

    def setUp(self):
        self.lines = transcript(explore(mpi_any(0)))

    def test_first_trace_runs_actors_in_order(self):
        traces = [line for line in self.lines if line.startswith("trace ")]
        self.assertEqual(traces[0], "trace P1.P2.P3.P3.P3.P3 Safe")
        self.assertEqual(len(traces), 4)

    def test_send_race_reversed_at_root(self):
        self.assertIn("race 1-2 at <root> v=P3.P2 -> <root>", self.lines)
        self.assertIn("race 2-4 at P1 v=P3.P3 -> P1", self.lines)

    def test_starts_by_seeding_root(self):
        self.assertEqual(self.lines[:3], ["seed <root> <- P1", "head <root>", "expand <root> <- P1"])


class TestStrategies(unittest.TestCase):
    def test_parse(self):
        self.assertIs(Strategy.parse("rfs-step", 4).policy, StrategyPolicy.RFS_STEP)
        self.assertEqual(Strategy.parse("dfs").name, "dfs")
        with self.assertRaises(ValueError):
            Strategy.parse("bfs")

    def test_depth_first_head_choice(self):
        """Deepest pending node first; among equally deep ones the newest."""
        heads = ExpHeads()
        deep = ExplorationNode(path=(0, 1), pcs=(1, 1))
        shallow = ExplorationNode(path=(), pcs=(0, 0))
        heads.add(deep)
        heads.add(shallow)
        for name in ("dfs", "uniform-dfs"):
            self.assertIs(StrategyRunner(Strategy.parse(name)).pick_head(heads), deep)

        sibling = ExplorationNode(path=(1, 0), pcs=(1, 1))
        heads.add(sibling)
        self.assertIs(StrategyRunner(Strategy()).pick_head(heads), sibling)

    def test_rfs_branch_extends_branch_until_maximal(self):
        """After a non-maximal expansion the next head is the new child."""
        program = philosophers_mutex(2)
        for seed in range(5):
            lines = transcript(explore(program, strategy=Strategy.parse("rfs-branch", seed)))
            pending = None
            for line in lines:
                if line.startswith("expand "):
                    _, path, _, actor = line.split()
                    pending = actor if path == "<root>" else f"{path}.{actor}"
                elif line.startswith(("trace ", "blocked ")):
                    pending = None
                elif line.startswith("head ") and pending is not None:
                    self.assertEqual(line, f"head {pending}")
                    pending = None

    def test_explore_from_prefix(self):
        """Continuations of P2 sending first all deadlock."""
        verdict = Explorer(mpi_any(0)).explore_from([P2])
        self.assertEqual(verdict.stats.traces_explored, 2)
        self.assertTrue(all(trace.outcome is RunOutcome.DEADLOCK for trace in verdict.traces))
        self.assertTrue(all(trace.actors[0] == P2 for trace in verdict.traces))


ACCEPTANCE_PROGRAMS = [
    pytest.param(mpi_any(0), id="mpi_any0"),
    pytest.param(mpi_any(1), id="mpi_any1"),
    pytest.param(mpi_any(2), id="mpi_any2"),
    pytest.param(philosophers_mutex(2), id="philosophers_mutex2"),
    pytest.param(philosophers_mutex(3), id="philosophers_mutex3"),
    pytest.param(philosophers_semaphore(2), id="philosophers_semaphore2"),
] + [pytest.param(factorial_bench(n), id=f"factorial{n}") for n in range(1, 7)]


@pytest.mark.slow
class TestBenchmarkSuite:
    """Every strategy, five seeds, GC on and off: exactly the oracle's classes."""

    @pytest.mark.parametrize("program", ACCEPTANCE_PROGRAMS)
    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_matches_oracle(self, program, name):
        classes = class_keys(program)
        for seed in range(5):
            strategy = Strategy.parse(name, seed)
            with_gc = run_exhaustive(program, strategy, gc_enabled=True)
            without_gc = run_exhaustive(program, strategy, gc_enabled=False)
            assert_matches_oracle(program, with_gc, classes)
            assert_matches_oracle(program, without_gc, classes)
            assert with_gc.outcome is without_gc.outcome


def assert_finds_deadlock(program, strategy):
    verdict = explore(program, strategy=strategy, budget=Budget(timeout_s=120), stop_at_first_bug=True)
    assert verdict.outcome is Outcome.DEADLOCK, f"{strategy.name} seed {strategy.seed}: {verdict.outcome.value}"
    assert Simulator(program).classify(verdict.counterexample) is RunOutcome.DEADLOCK
    assert verdict.stats.states_before_first_bug is not None


RANDOMISED = [name for name in STRATEGY_NAMES if name != "dfs"]


class TestDeadlockDetection:
    """stop_at_first_bug finds a replayable deadlock on the deadlocking benchmarks."""

    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_small_benchmarks(self, name):
        for program in (mpi_any(1), philosophers_mutex(2), philosophers_semaphore(2)):
            for seed in range(5):
                assert_finds_deadlock(program, Strategy.parse(name, seed))

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "program",
        [
            pytest.param(mpi_any(2), id="mpi_any2"),
            pytest.param(philosophers_mutex(3), id="philosophers_mutex3"),
            pytest.param(philosophers_mutex(4), id="philosophers_mutex4"),
            pytest.param(philosophers_semaphore(3), id="philosophers_semaphore3"),
        ],
    )
    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_every_strategy(self, program, name):
        for seed in range(5):
            assert_finds_deadlock(program, Strategy.parse(name, seed))

    @pytest.mark.slow
    @pytest.mark.parametrize("name", RANDOMISED)
    def test_randomised_strategies_on_four_semaphore_philosophers(self, name):
        program = philosophers_semaphore(4)
        for seed in range(5):
            assert_finds_deadlock(program, Strategy.parse(name, seed))

    @pytest.mark.slow
    def test_dfs_misses_four_semaphore_philosophers_early(self):
        """The deadlock sits far to the right of the dfs order."""
        verdict = explore(philosophers_semaphore(4), budget=Budget(max_states=20000), stop_at_first_bug=True)
        assert verdict.outcome is Outcome.EXHAUSTED
        assert verdict.stats.states_before_first_bug is None


@pytest.mark.slow
class TestRandomFirstSearch:
    """Randomised head selection finds bugs earlier than depth-first order."""

    @pytest.mark.parametrize(
        "program",
        [
            pytest.param(philosophers_semaphore(3), id="philosophers_semaphore3"),
            pytest.param(mpi_any(3), id="mpi_any3"),
        ],
    )
    def test_rfs_step_median_below_dfs(self, program):
        dfs = summarize(run_sweep(program, ["dfs"], range(1)))[0]
        rfs_step = summarize(run_sweep(program, ["rfs-step"], range(100)))[0]
        assert dfs.exhausted == 0 and rfs_step.exhausted == 0
        assert rfs_step.median < dfs.median

    def test_rfs_step_upper_quartile_below_uniform_dfs_median(self):
        rows = run_sweep(mpi_any(3), ["uniform-dfs", "rfs-step"], range(100))
        uniform, rfs_step = summarize(rows)
        assert uniform.strategy == "uniform-dfs"
        assert rfs_step.q3 < uniform.median

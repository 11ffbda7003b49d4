"""
Tests for critical-transition search, checked against the brute-force oracle.
"""

import unittest

import pytest

from RFSMC.bench.generators import (
    all_faulty,
    busy_wait,
    four_actor_deadlock,
    mpi_any,
    philosophers_mutex,
    philosophers_semaphore,
)
from RFSMC.ctsearch.crash import crash_adaptation
from RFSMC.ctsearch.critical import (
    CriticalTransitionSearch,
    causal_past,
    find_critical_transition,
    is_prefix_equivalent,
)
from RFSMC.explorer.explorer import explore
from RFSMC.explorer.strategy import Strategy
from RFSMC.model.actions import ActionKind
from RFSMC.model.simulator import Execution
from RFSMC.oracle.brute_force import oracle_ct
from RFSMC.shared.errors import ContractViolation
from RFSMC.shared.settings import STRATEGY_NAMES
from RFSMC.wakeup.tree import ExplorationNode

P1, P2, P3 = 0, 1, 2


def first_bug(program, strategy=None):
    verdict = explore(program, strategy=strategy, stop_at_first_bug=True)
    assert verdict.counterexample is not None
    return verdict


class TestMpiAny:
    """The critical transition of mpi_any is P2's send, however padded."""

    @pytest.mark.parametrize("pad", range(6))
    def test_p2_send_is_critical(self, pad):
        program = mpi_any(0, pad)
        verdict = first_bug(program)
        report = find_critical_transition(program, verdict.counterexample, verdict)

        assert report.ct.actor == P2
        assert report.ct.action.kind is ActionKind.ASYNC_SEND
        assert report.ct_index == verdict.counterexample.actors.index(P2) + 1
        assert report.ct_index == oracle_ct(program, verdict.counterexample)
        assert not report.inconclusive
        assert report.correct_witness is not None

    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_every_strategy(self, name):
        program = mpi_any(1)
        for seed in range(3):
            strategy = Strategy.parse(name, seed)
            verdict = first_bug(program, strategy)
            report = find_critical_transition(program, verdict.counterexample, verdict, strategy=strategy)
            assert report.ct_index == oracle_ct(program, verdict.counterexample)
            assert report.ct.actor == P2
            assert report.reexplored_traces == 0
            assert report.s1_claim_holds is not False

    def test_without_explorer_state(self):
        program = mpi_any(0)
        faulty = Execution.from_actors(program, [P3, P2, P1, P3, P3])
        report = find_critical_transition(program, faulty)
        assert report.ct_index == 2
        assert report.reused_witnesses == 0
        assert report.sub_explorations >= 1

    def test_witness_extends_prefix(self):
        program = mpi_any(0)
        faulty = Execution.from_actors(program, [P3, P2, P1, P3, P3])
        report = find_critical_transition(program, faulty)
        prefix = faulty.prefix(report.ct_index - 1)
        assert is_prefix_equivalent(prefix, report.correct_witness)


FAULTY_BENCHMARKS = [
    pytest.param(mpi_any(0), id="mpi_any0"),
    pytest.param(mpi_any(1), id="mpi_any1"),
    pytest.param(mpi_any(2), id="mpi_any2"),
    pytest.param(mpi_any(0, 5), id="mpi_any0_pad5"),
    pytest.param(philosophers_mutex(2), id="philosophers_mutex2"),
    pytest.param(philosophers_mutex(3), id="philosophers_mutex3"),
    pytest.param(philosophers_semaphore(2), id="philosophers_semaphore2"),
    pytest.param(busy_wait(1), id="busy_wait1"),
    pytest.param(four_actor_deadlock(), id="four_actor_deadlock"),
]


class TestOracleAgreement:
    @pytest.mark.parametrize(
        "program",
        [
            pytest.param(philosophers_mutex(2), id="philosophers_mutex2"),
            pytest.param(philosophers_semaphore(2), id="philosophers_semaphore2"),
            pytest.param(busy_wait(1), id="busy_wait1"),
            pytest.param(four_actor_deadlock(), id="four_actor_deadlock"),
            pytest.param(mpi_any(0, 2), id="mpi_any0_pad2"),
        ],
    )
    @pytest.mark.parametrize("name", ["dfs", "rfs-step"])
    def test_matches_oracle(self, program, name):
        strategy = Strategy.parse(name, 5)
        verdict = first_bug(program, strategy)
        report = find_critical_transition(program, verdict.counterexample, verdict, strategy=strategy)
        assert report.ct_index == oracle_ct(program, verdict.counterexample)
        assert report.reexplored_traces == 0
        assert report.s1_claim_holds is not False

    @pytest.mark.slow
    @pytest.mark.parametrize("program", FAULTY_BENCHMARKS)
    @pytest.mark.parametrize("name", STRATEGY_NAMES)
    def test_every_strategy_and_seed(self, program, name):
        for seed in range(4):
            strategy = Strategy.parse(name, seed)
            verdict = first_bug(program, strategy)
            report = find_critical_transition(program, verdict.counterexample, verdict, strategy=strategy)
            assert report.ct_index == oracle_ct(program, verdict.counterexample)
            assert not report.inconclusive
            assert report.reexplored_traces == 0
            assert report.s1_claim_holds is not False
            if report.s1_size:
                # the sweep never needs to go below the first empty sleep set
                assert report.ct_index > report.s1_size


class TestSpecialCases(unittest.TestCase):
    def test_all_faulty_has_no_critical_transition(self):
        program = all_faulty(2)
        verdict = first_bug(program)
        report = find_critical_transition(program, verdict.counterexample, verdict)
        self.assertEqual(report.ct_index, 0)
        self.assertIsNone(report.ct)
        self.assertIsNone(report.correct_witness)
        self.assertFalse(report.multi_cause)
        self.assertEqual(report.causal_past, frozenset())
        self.assertEqual(oracle_ct(program, verdict.counterexample), 0)

    def test_two_independent_deadlocks_flag_multi_cause(self):
        program = four_actor_deadlock()
        # both pairs take their first lock, then request the second one
        faulty = Execution.from_actors(program, [0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3])
        report = find_critical_transition(program, faulty)
        self.assertEqual(report.ct_index, 2)
        self.assertEqual(report.ct_index, oracle_ct(program, faulty))
        self.assertTrue(report.multi_cause)

    def test_single_deadlock_is_not_multi_cause(self):
        program = philosophers_mutex(2)
        faulty = Execution.from_actors(program, [0, 1, 0, 1, 0, 1])
        report = find_critical_transition(program, faulty)
        self.assertEqual(report.ct_index, 2)
        self.assertFalse(report.multi_cause)

    def test_safe_execution_is_rejected(self):
        program = mpi_any(0)
        safe = Execution.from_actors(program, [P1, P2, P3, P3, P3, P3])
        with self.assertRaises(ContractViolation):
            CriticalTransitionSearch(program).search(safe)


class TestHelpers(unittest.TestCase):
    def test_causal_past(self):
        program = mpi_any(0)
        execution = Execution.from_actors(program, [P3, P2, P1, P3, P3])
        self.assertEqual(causal_past(execution, 0), frozenset())
        self.assertEqual(causal_past(execution, 2), frozenset())
        self.assertEqual(causal_past(execution, 4), frozenset({1, 2, 3}))

    def test_is_prefix_equivalent(self):
        program = mpi_any(0)
        other = Execution.from_actors(program, [P1, P2, P3, P3, P3, P3])
        # P3's receive commutes with both sends
        self.assertTrue(is_prefix_equivalent(Execution.from_actors(program, [P3]), other))
        self.assertTrue(is_prefix_equivalent(Execution.from_actors(program, [P1, P3]), other))
        # the sends are ordered the other way round in other
        self.assertFalse(is_prefix_equivalent(Execution.from_actors(program, [P2, P1]), other))
        # P3's wait needs P2's send, which is missing from the prefix
        self.assertFalse(is_prefix_equivalent(Execution.from_actors(program, [P1, P3, P3]), other))

    def test_crash_adaptation_adds_missing_actors(self):
        node = ExplorationNode(path=(), pcs=(0, 0, 0))
        node.done.append(0)
        node.sleep.add(2)
        self.assertEqual(crash_adaptation(node, {0, 1, 2}), [1])
        self.assertEqual(node.wut.height_one(), [1])
        self.assertEqual(crash_adaptation(node, {0, 1, 2}), [])

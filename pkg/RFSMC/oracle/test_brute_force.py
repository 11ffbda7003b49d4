"""
Unit tests for the brute-force oracle.
"""

import unittest

from RFSMC.bench.generators import all_faulty, factorial_bench, mpi_any, philosophers_mutex
from RFSMC.model.program import ProgramBuilder
from RFSMC.model.simulator import Execution, RunOutcome
from RFSMC.oracle.brute_force import (
    check_verdict_consistency,
    class_keys,
    class_search,
    count_classes,
    enumerate_all,
    hb_equivalent,
    iter_executions,
    oracle_ct,
    partition_by_hb,
)
from RFSMC.shared.errors import ContractViolation, OracleBudgetExceeded


def two_locals():
    builder = ProgramBuilder()
    builder.actor("A").local()
    builder.actor("B").local()
    return builder.build()


class TestEnumeration(unittest.TestCase):
    """Tests for enumerate_all and iter_executions."""

    def test_every_interleaving(self):
        self.assertEqual(len(enumerate_all(factorial_bench(3))), 6)
        self.assertEqual(len(enumerate_all(two_locals())), 2)

    def test_lexicographic_order(self):
        paths = [path for path, _ in iter_executions(two_locals())]
        self.assertEqual(paths, [(0, 1), (1, 0)])

    def test_budget(self):
        with self.assertRaises(OracleBudgetExceeded) as ctx:
            enumerate_all(factorial_bench(4), max_executions=10)
        self.assertEqual(ctx.exception.budget, 10)


class TestClasses(unittest.TestCase):
    """Tests for class counting in lexicographic normal form."""

    def test_factorial_counts(self):
        self.assertEqual(count_classes(factorial_bench(4)), 24)
        self.assertEqual(count_classes(factorial_bench(1)), 1)

    def test_independent_actors_form_one_class(self):
        self.assertEqual(class_keys(two_locals()), {(0, 1): RunOutcome.SAFE})

    def test_prefix_classes_visited(self):
        classes, visited = class_search(factorial_bench(2))
        self.assertEqual(classes, {(0, 1): RunOutcome.SAFE, (1, 0): RunOutcome.SAFE})
        self.assertEqual(visited, 4)

    def test_mpi_any_classes(self):
        outcomes = sorted(outcome.value for outcome in class_keys(mpi_any(0)).values())
        self.assertEqual(outcomes, ["Deadlock", "Deadlock", "Safe", "Safe"])

    def test_class_budget(self):
        with self.assertRaises(OracleBudgetExceeded):
            class_keys(factorial_bench(3), max_prefix_classes=3)

    def test_verdict_consistency(self):
        self.assertTrue(check_verdict_consistency(mpi_any(0)))
        self.assertTrue(check_verdict_consistency(philosophers_mutex(2)))


class TestPartition(unittest.TestCase):
    def test_partition_by_hb(self):
        groups = partition_by_hb(enumerate_all(two_locals()))
        self.assertEqual(len(groups), 1)
        self.assertEqual(len(groups[0]), 2)
        self.assertEqual(len(partition_by_hb(enumerate_all(factorial_bench(3)))), 6)

    def test_partition_matches_class_count(self):
        program = mpi_any(0)
        self.assertEqual(len(partition_by_hb(enumerate_all(program))), count_classes(program))

    def test_partition_minima_are_class_keys(self):
        # the least interleaving of each happens-before group is its normal form
        for program in (mpi_any(0), philosophers_mutex(2), factorial_bench(3)):
            groups = partition_by_hb(enumerate_all(program))
            minima = {min(tuple(execution.actors) for execution in group) for group in groups}
            self.assertEqual(minima, set(class_keys(program)))

    def test_hb_equivalent(self):
        program = two_locals()
        first = Execution.from_actors(program, [0, 1])
        second = Execution.from_actors(program, [1, 0])
        self.assertTrue(hb_equivalent(first, second))
        program = factorial_bench(2)
        self.assertFalse(
            hb_equivalent(Execution.from_actors(program, [0, 1]), Execution.from_actors(program, [1, 0]))
        )


class TestOracleCt(unittest.TestCase):
    def test_mpi_any(self):
        program = mpi_any(0)
        self.assertEqual(oracle_ct(program, Execution.from_actors(program, [1, 0, 2, 2, 2])), 1)
        self.assertEqual(oracle_ct(program, Execution.from_actors(program, [2, 1, 0, 2, 2])), 2)

    def test_no_correct_execution(self):
        program = all_faulty(2)
        faulty = Execution.from_actors(program, [0, 1, 0, 0])
        self.assertEqual(oracle_ct(program, faulty), 0)

    def test_rejects_safe_execution(self):
        program = mpi_any(0)
        with self.assertRaises(ContractViolation):
            oracle_ct(program, Execution.from_actors(program, [0, 1, 2, 2, 2, 2]))

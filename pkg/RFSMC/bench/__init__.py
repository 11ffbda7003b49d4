from RFSMC.bench.generators import (
    BENCHMARKS,
    RandomBounds,
    all_faulty,
    busy_wait,
    factorial_bench,
    four_actor_deadlock,
    generate,
    mpi_any,
    philosophers_mutex,
    philosophers_semaphore,
    random_program,
)

__all__ = [
    "BENCHMARKS",
    "RandomBounds",
    "all_faulty",
    "busy_wait",
    "factorial_bench",
    "four_actor_deadlock",
    "generate",
    "mpi_any",
    "philosophers_mutex",
    "philosophers_semaphore",
    "random_program",
]

"""Profiling utilities for performance analysis."""

import cProfile
import io
import os
import pstats
from contextlib import contextmanager
from typing import Optional, TextIO


def top_functions(profiler: cProfile.Profile, limit: int = 15) -> str:
    """Cumulative-time summary of the hottest functions."""
    s = io.StringIO()
    pstats.Stats(profiler, stream=s).sort_stats("cumulative").print_stats(limit)
    return s.getvalue()


@contextmanager
def profile_block(name: str, output_dir: Optional[str] = None, stream: Optional[TextIO] = None):
    """Context manager to profile a block of code.

    Args:
        name: Name for this profiling block (file stem of the .prof output)
        output_dir: Directory to save profiling stats; when None the summary
            is written to stream instead
        stream: Where the summary or the saved-file notice goes (stderr-like)

    Example:
        with profile_block("explore_mpi_any", "profiling_data"):
            explore(program)
    """
    profiler = cProfile.Profile()
    profiler.enable()

    try:
        yield profiler
    finally:
        profiler.disable()

        if output_dir:
            os.makedirs(output_dir, exist_ok=True)
            output_file = os.path.join(output_dir, f"{name}.prof")
            profiler.dump_stats(output_file)
            message = f"[profiling] {name} saved to {output_file} (view with: snakeviz {output_file})"
        else:
            message = f"[profiling] {name}:\n{top_functions(profiler)}"
        if stream is not None:
            stream.write(message + "\n")

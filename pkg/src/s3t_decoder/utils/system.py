"""Utilities for sizing the cross-validation worker pool."""

import multiprocessing
import os
from functools import lru_cache

import psutil


@lru_cache(maxsize=1)
def get_system_info():
    """
    Get system information including CPU count and available memory.
    Cached to avoid repeated system calls.
    """
    return {
        "total_cores": multiprocessing.cpu_count(),
        "total_memory": psutil.virtual_memory().total,
    }


def get_worker_count(n_tasks: int | None = None, is_ci: bool | None = None) -> int:
    """
    Get the number of concurrent fold workers.

    Each fold holds its own copy of the training data, activations and optimizer
    moments, so memory limits the pool before CPU count does. numpy already
    parallelizes large products internally, so the pool never exceeds the core count.

    Args:
        n_tasks: Number of folds to run; the pool is never larger than this.
        is_ci: Optional boolean to force CI behavior. If None, determines from environment.

    Returns:
        int: Number of worker threads, at least 1
    """
    system_info = get_system_info()
    cpu_count = system_info["total_cores"]
    memory_gb = system_info["total_memory"] / (1024**3)

    if is_ci is None:
        is_ci = os.environ.get("CI", "").lower() == "true"

    if memory_gb < 4:
        workers = 1
    elif memory_gb <= 8:
        workers = min(2, cpu_count)
    elif is_ci:
        workers = min(2, max(1, cpu_count // 2))
    else:
        workers = min(8, cpu_count)

    if n_tasks is not None:
        workers = min(workers, n_tasks)
    return max(1, workers)

"""Thread-pool helpers for Monte-Carlo units of work (references, replicates, repetitions)"""

import os
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

log = logging.getLogger("elbowsig")

T = TypeVar("T")
R = TypeVar("R")


def default_threads() -> int:
    """Worker count: ELBOWSIG_THREADS if set, otherwise the number of available cores"""
    env_threads = os.getenv("ELBOWSIG_THREADS")
    if env_threads:
        try:
            return max(1, int(env_threads))
        except ValueError:
            log.warning(f"Ignoring non-integer ELBOWSIG_THREADS={env_threads!r}")
    return os.cpu_count() or 1


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Apply func to every item, results in input order.

    Args:
        func (Callable): Function of one item
        items (Iterable): The work items
        threads (int, optional): Worker threads (default: default_threads(), 1 runs inline)

    Returns:
        list: func(item) for each item, in the order of items
    """
    items = list(items)
    threads = default_threads() if threads is None else threads
    actual_threads = min(max(1, threads), len(items)) if items else 1
    if actual_threads <= 1:
        return [func(item) for item in items]

    log.debug(f"Running {len(items)} tasks on {actual_threads} threads...")
    with ThreadPoolExecutor(max_workers=actual_threads) as executor:
        return list(executor.map(func, items))


if __name__ == "__main__":
    print(default_threads())
    print(parallel_map(lambda x: x * x, range(10), threads=4))

"""
Ordered fan-out for independent units of work.

Every unit passed here is a pure function of its input, so results only need
to come back in input order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from contextvars import copy_context
from typing import Callable, Iterable, List, Optional, TypeVar

from hypersurf.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def worker_count(threads: Optional[int] = None) -> int:
    """Resolve the effective worker cap (explicit value, then settings)."""
    value = threads if threads is not None else settings.THREADS
    return max(1, value or 1)


def ordered_map(
    fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """
    Apply ``fn`` to every item, possibly in parallel, keeping input order.

    Args:
        fn: Pure function applied to each item
        items: Work units
        threads: Optional cap overriding ``settings.THREADS``

    Returns:
        Results in the same order as ``items``
    """
    work = list(items)
    workers = min(worker_count(threads), len(work)) if work else 1
    if workers <= 1:
        return [fn(item) for item in work]

    logger.debug(f"Fanning out {len(work)} units over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # Units run in a copy of the caller context; log records keep the run id.
        futures = [pool.submit(copy_context().run, fn, item) for item in work]
        return [future.result() for future in futures]

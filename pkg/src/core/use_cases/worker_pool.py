"""Fan-out of independent synchronous work items onto a thread pool."""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


async def map_in_pool(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """
    Run ``func`` over ``items`` on ``jobs`` worker threads.

    Results come back in input order whatever the completion order. The
    first exception raised by a worker propagates once every item finished.

    Args:
        func: Synchronous callable applied to each item
        items: Work items
        jobs: Number of worker threads (at least 1)

    Returns:
        List of results aligned with ``items``
    """
    if not items:
        return []
    jobs = max(1, min(int(jobs), len(items)))
    loop = asyncio.get_running_loop()
    logger.debug(f"Dispatching {len(items)} work items to {jobs} worker(s)")
    with ThreadPoolExecutor(max_workers=jobs, thread_name_prefix="implylp") as pool:
        futures = [loop.run_in_executor(pool, partial(func, item)) for item in items]
        return list(await asyncio.gather(*futures))

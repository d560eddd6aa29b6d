"""
Grid Executor - evaluates grid points concurrently

Points run in worker threads, at most `jobs` at a time. Results come back
in point order whatever the completion order, and a point that raises is
returned as its exception so one bad point never aborts the batch.
"""

import asyncio
import logging
from typing import Callable, List, Sequence, TypeVar, Union

logger = logging.getLogger(__name__)

P = TypeVar("P")
R = TypeVar("R")


async def evaluate_points(
    points: Sequence[P],
    evaluate: Callable[[P], R],
    jobs: int = 1,
) -> List[Union[R, BaseException]]:
    """
    Run evaluate(point) for every point with bounded concurrency.

    Args:
        points: Grid points in report order
        evaluate: Synchronous evaluation of one point
        jobs: Maximum number of points evaluated at once

    Returns:
        One entry per point, in the order of `points`; failures are the raised exceptions
    """
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")
    semaphore = asyncio.Semaphore(jobs)

    async def run_one(point: P) -> R:
        async with semaphore:
            return await asyncio.to_thread(evaluate, point)

    logger.info("Evaluating %d grid points with %d worker(s)", len(points), jobs)
    results = await asyncio.gather(*(run_one(point) for point in points), return_exceptions=True)

    failed = sum(isinstance(r, BaseException) for r in results)
    if failed:
        logger.warning("%d of %d grid points raised", failed, len(results))
    return list(results)


def run_grid(points: Sequence[P], evaluate: Callable[[P], R], jobs: int = 1) -> List[Union[R, BaseException]]:
    """Blocking wrapper around evaluate_points for synchronous callers."""
    return asyncio.run(evaluate_points(points, evaluate, jobs))

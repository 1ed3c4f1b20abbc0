"""
Nebenläufige Grid-Auswertung.

Jeder Grid-Punkt läuft per asyncio.to_thread (LAPACK gibt den GIL frei),
begrenzt durch einen Semaphore. Ergebnisse kommen in Grid-Reihenfolge.
"""

import asyncio
import logging
from typing import Any, Callable, Iterable, Optional, TypeVar

from . import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


async def evaluate_grid(
    fn: Callable[[T], R],
    items: Iterable[T],
    max_concurrency: Optional[int] = None,
    return_exceptions: bool = False,
) -> list[Any]:
    semaphore = asyncio.Semaphore(max(1, max_concurrency or config.SWEEP_CONCURRENCY))

    async def run_one(item: T):
        async with semaphore:
            return await asyncio.to_thread(fn, item)

    return await asyncio.gather(*(run_one(item) for item in items), return_exceptions=return_exceptions)


def run_grid(
    fn: Callable[[T], R],
    items: Iterable[T],
    max_concurrency: Optional[int] = None,
    return_exceptions: bool = False,
) -> list[Any]:
    """Synchroner Wrapper; innerhalb eines laufenden Loops sequentiell."""
    items = list(items)
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return asyncio.run(evaluate_grid(fn, items, max_concurrency, return_exceptions))

    logger.debug("run_grid im laufenden Event Loop, werte sequentiell aus")
    results = []
    for item in items:
        try:
            results.append(fn(item))
        except Exception as e:
            if not return_exceptions:
                raise
            results.append(e)
    return results

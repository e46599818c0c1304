import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from utils.settings import settings

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def worker_count(threads: Optional[int] = None) -> int:
    """Resolve the worker cap; 0 means one worker per CPU"""
    requested = settings.threads if threads is None else threads
    if requested <= 0:
        return os.cpu_count() or 1
    return requested


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Map fn over items concurrently and return results in input order.
    Falls back to a plain loop when only one worker is available.
    """
    items = list(items)
    workers = min(worker_count(threads), max(len(items), 1))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))

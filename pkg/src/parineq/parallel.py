"""Order-preserving thread map used wherever work is fanned out."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator


def ordered_map(fn: Callable, items: Iterable, threads: int = 1) -> Iterator:
    """Like ``map(fn, items)`` but run on ``threads`` workers.

    At most ``4 * threads`` items are in flight, and results come back in
    input order, so callers reduce in the same order whatever the worker count.
    """
    if threads <= 1:
        yield from map(fn, items)
        return
    window = 4 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()

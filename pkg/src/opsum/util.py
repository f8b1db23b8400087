"""Small shared helpers."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def parallel_map(fn, items, workers: int = 1) -> list:
    """Ordered map, optionally fanned out over a thread pool.

    Results always come back in input order, so output is identical for
    any worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

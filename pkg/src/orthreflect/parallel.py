"""Seed fan-out with a deterministic, seed-ordered merge."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(threads: int | None = None) -> int:
    """Worker count: explicit argument, else ``REFLECT_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get("REFLECT_THREADS", "").strip()
        threads = int(env) if env else 1
    return max(1, int(threads))


def ordered_map(fn, items, threads: int | None = None) -> list:
    items = list(items)
    k = min(thread_count(threads), max(1, len(items)))
    if k == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))

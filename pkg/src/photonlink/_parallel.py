"""Worker-count policy and order-preserving parallel map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "PHOTONLINK_THREADS"


def worker_count(requested: int | None = None) -> int:
    """Number of workers to use, capped by ``$PHOTONLINK_THREADS`` when set."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(ENV_THREADS)
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ValueError(f"{ENV_THREADS} must be an integer, got {cap!r}") from None
    return max(1, n)


def ordered_map(fn, items, workers: int | None = None):
    """``list(map(fn, items))``, possibly threaded; results keep input order."""
    items = list(items)
    n = min(worker_count(workers), len(items)) if items else 1
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))

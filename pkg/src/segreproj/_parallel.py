"""Deterministic fan-out of index ranges over a thread pool."""
from concurrent.futures import ThreadPoolExecutor


def partition(total, workers):
    """Split ``range(total)`` into at most ``workers`` contiguous chunks."""
    workers = max(1, min(int(workers), total)) if total else 1
    base, extra = divmod(total, workers)
    out, start = [], 0
    for w in range(workers):
        stop = start + base + (1 if w < extra else 0)
        out.append((start, stop))
        start = stop
    return out


def map_ranges(fn, total, workers=1):
    """Apply ``fn(start, stop) -> list`` over a partition and concatenate in index order.

    Every item must depend only on its own index, so the output is the same
    for any worker count.
    """
    chunks = partition(total, workers)
    if len(chunks) <= 1:
        return list(fn(0, total)) if total else []
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda c: fn(*c), chunks))
    return [item for part in parts for item in part]

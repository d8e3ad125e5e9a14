import os
from concurrent.futures import ProcessPoolExecutor

WORKERS_ENV = "SADDLENODE_WORKERS"


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def ordered_map(fn, items, workers=None):
    """``list(map(fn, items))``, optionally across processes; result order follows ``items``."""
    items = list(items)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "STOCH_DUOPOLY_THREADS"


def worker_count():
    """Thread cap from STOCH_DUOPOLY_THREADS; 0 or unset means all cores."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def ordered_map(fn, items):
    """map() that may run concurrently but always returns results in input order."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))

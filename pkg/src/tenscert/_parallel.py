import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "TENSCERT_THREADS"


def default_workers():
    """Worker cap from ``TENSCERT_THREADS``, else the CPU count."""
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pmap(fn, items, workers=None):
    """Order-preserving map; results never depend on scheduling."""
    items = list(items)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))

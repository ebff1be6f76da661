"""Order-preserving map over worker processes."""

from concurrent.futures import ProcessPoolExecutor
from functools import partial


def parallel_map(fn, items, jobs=1, **kwargs):
    """``[fn(item, **kwargs) for item in items]``, optionally in ``jobs`` processes."""
    items = list(items)
    func = partial(fn, **kwargs)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=chunksize))

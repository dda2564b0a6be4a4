"""Random and low-discrepancy point sources, and the thread pool helper.

Random streams use the counter-based Philox generator keyed by the seed, and
all samples are drawn up front in the calling thread, so results do not
depend on how work is later split across threads.
"""

from concurrent.futures import ThreadPoolExecutor
import os

import numpy as np
from scipy.stats import qmc


def make_rng(seed):
    return np.random.Generator(np.random.Philox(key=int(seed) % (1 << 64)))


def uniform_disc(rng, count, radius=1.0, center=(0.0, 0.0)):
    """Points uniformly distributed (by area) in a disc."""
    r = radius * np.sqrt(rng.random(count))
    theta = 2 * np.pi * rng.random(count)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)]) + np.asarray(center)


def uniform_square(rng, count):
    """Points uniformly distributed in ``[0, 1)^2``."""
    return rng.random((count, 2))


def halton_points(count, lower=(0.0, 0.0), upper=(1.0, 1.0)):
    """The first ``count`` points of the 2-d Halton sequence (unscrambled, skipping 0)."""
    pts = qmc.Halton(d=2, scramble=False).random(count + 1)[1:]
    lo, hi = np.asarray(lower, float), np.asarray(upper, float)
    return lo + pts * (hi - lo)


def thread_count():
    """Worker cap from ``TORSIONLAB_THREADS`` (default 1)."""
    raw = os.environ.get("TORSIONLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map, threaded when ``TORSIONLAB_THREADS`` > 1."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def chunked(count, size):
    """Index ranges covering ``range(count)`` in pieces of at most ``size``."""
    return [np.arange(s, min(count, s + size)) for s in range(0, count, size)]

"""Pure-numpy correspondence kernel, used when the compiled extension is
unavailable. Must stay exactly interchangeable with ``_native``: same
tie-breaking (lowest target index wins) and same rejection semantics.
"""

import numpy as np


def batch_nearest(source, target, max_dist):
    """For each source point, index and distance of its nearest target point.

    Points beyond ``max_dist`` get index -1. ``np.inf`` disables rejection.
    Returns (indices int64 (N,), distances float64 (N,)).
    """
    source = np.ascontiguousarray(source, dtype=np.float64)
    target = np.ascontiguousarray(target, dtype=np.float64)
    if target.shape[0] == 0:
        n = source.shape[0]
        return np.full(n, -1, dtype=np.int64), np.full(n, np.inf)
    # (N, M) squared distances; argmin returns the first (lowest-index) minimum.
    d2 = ((source[:, None, :] - target[None, :, :]) ** 2).sum(axis=2)
    indices = np.argmin(d2, axis=1).astype(np.int64)
    distances = np.sqrt(d2[np.arange(source.shape[0]), indices])
    rejected = distances > max_dist
    indices[rejected] = -1
    distances[rejected] = np.inf
    return indices, distances

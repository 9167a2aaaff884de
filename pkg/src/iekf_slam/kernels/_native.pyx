# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled correspondence kernel. Semantics must match _fallback exactly:
lowest target index wins ties, points beyond max_dist get index -1."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def batch_nearest(source, target, double max_dist):
    """For each source point, index and distance of its nearest target point."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] src = np.ascontiguousarray(source, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] tgt = np.ascontiguousarray(target, dtype=np.float64)
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t m = tgt.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] indices = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] distances = np.full(n, np.inf)
    cdef Py_ssize_t i, j
    cdef double dx, dy, dz, d2, best, max_d2
    cdef Py_ssize_t best_j
    if m == 0:
        return indices, distances
    max_d2 = max_dist * max_dist if max_dist != np.inf else np.inf
    for i in range(n):
        best = np.inf
        best_j = -1
        for j in range(m):
            dx = src[i, 0] - tgt[j, 0]
            dy = src[i, 1] - tgt[j, 1]
            dz = src[i, 2] - tgt[j, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 < best:
                best = d2
                best_j = j
        if best <= max_d2:
            indices[i] = best_j
            distances[i] = best ** 0.5
        # else: leave -1 / inf
    return indices, distances

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the clustering kernels.

Mirrors ``_numpy`` exactly: same update arithmetic, same tie-breaking.
The win is the sequential merge/assignment loops, which dominate at
corpus scale and vectorize poorly.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

from libc.math cimport INFINITY, sqrt


def lloyd(points_in, centroids_in, int max_iters):
    """Spherical k-means iterations; see the numpy backend for the contract.

    The similarity product stays in BLAS (it dominates and a plain C loop
    cannot beat it); the argmax scan, empty-cluster repair, convergence
    check and centroid accumulation run as C loops.
    """
    points_arr = np.ascontiguousarray(points_in, dtype=np.float64)
    centroids_arr = np.array(centroids_in, dtype=np.float64, copy=True)
    cdef double[:, ::1] points = points_arr
    cdef double[:, ::1] centroids = centroids_arr
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t k = centroids.shape[0]

    prev_arr = np.full(n, -1, dtype=np.int64)
    labels_arr = np.empty(n, dtype=np.int64)
    fit_arr = np.empty(n, dtype=np.float64)
    counts_arr = np.zeros(k, dtype=np.int64)
    accum_arr = np.zeros((k, d), dtype=np.float64)
    cdef cnp.int64_t[::1] prev = prev_arr
    cdef cnp.int64_t[::1] labels = labels_arr
    cdef double[::1] fit = fit_arr
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef double[:, ::1] accum = accum_arr
    cdef double[:, ::1] sims

    cdef Py_ssize_t it = 0, i, j, c, best_i, first
    cdef cnp.int64_t bj
    cdef double s, best, best_fit, norm
    cdef bint same

    for it in range(1, max_iters + 1):
        # assignment: argmax dot, first index wins ties
        sims = np.matmul(points_arr, centroids_arr.T)
        for i in range(n):
            best = -INFINITY
            bj = 0
            for j in range(k):
                s = sims[i, j]
                if s > best:
                    best = s
                    bj = j
            labels[i] = bj
            fit[i] = best
        for j in range(k):
            counts[j] = 0
        for i in range(n):
            counts[labels[i]] += 1
        # re-seed empty clusters with the worst-fit eligible point
        for j in range(k):
            if counts[j] > 0:
                continue
            best_i = -1
            best_fit = INFINITY
            for i in range(n):
                if counts[labels[i]] >= 2 and fit[i] < best_fit:
                    best_fit = fit[i]
                    best_i = i
            counts[labels[best_i]] -= 1
            labels[best_i] = j
            counts[j] = 1
        same = True
        for i in range(n):
            if labels[i] != prev[i]:
                same = False
                break
        if same:
            return labels_arr.copy(), it
        for i in range(n):
            prev[i] = labels[i]
        # update: normalized member sum; zero sum falls back to first member
        for j in range(k):
            for c in range(d):
                accum[j, c] = 0.0
        for i in range(n):
            for c in range(d):
                accum[labels[i], c] += points[i, c]
        for j in range(k):
            norm = 0.0
            for c in range(d):
                norm += accum[j, c] * accum[j, c]
            norm = sqrt(norm)
            if norm == 0.0:
                first = 0
                for i in range(n):
                    if labels[i] == j:
                        first = i
                        break
                for c in range(d):
                    centroids[j, c] = points[first, c]
            else:
                for c in range(d):
                    centroids[j, c] = accum[j, c] / norm
    return labels_arr.copy(), it


def average_linkage(dist_in, Py_ssize_t k):
    """Average-linkage cut at k clusters; see the numpy backend for the contract.

    Keeps a per-row nearest-neighbor cache so a merge costs O(n) in the
    typical case instead of an O(n^2) rescan.
    """
    dist_arr = np.array(dist_in, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = dist_arr.shape[0]
    if dist_arr.ndim != 2 or dist_arr.shape[1] != n:
        raise ValueError("distance matrix must be square")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} points")

    cdef double[:, ::1] work = dist_arr
    size_arr = np.ones(n, dtype=np.int64)
    owner_arr = np.arange(n, dtype=np.int64)
    active_arr = np.ones(n, dtype=np.uint8)
    nn_dist_arr = np.full(n, INFINITY, dtype=np.float64)
    nn_idx_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] size = size_arr
    cdef cnp.int64_t[::1] owner = owner_arr
    cdef cnp.uint8_t[::1] active = active_arr
    cdef double[::1] nn_dist = nn_dist_arr
    cdef cnp.int64_t[::1] nn_idx = nn_idx_arr

    cdef Py_ssize_t i, j, m, merge, bi
    cdef double best, v
    cdef cnp.int64_t si, sj

    for i in range(n):
        work[i, i] = INFINITY
        _refresh_row(work, active, nn_dist, nn_idx, i, n)

    for merge in range(n - k):
        # global best pair: smallest distance, ties to smallest (i, j)
        bi = -1
        best = INFINITY
        for i in range(n):
            if active[i] and nn_idx[i] >= 0 and nn_dist[i] < best:
                best = nn_dist[i]
                bi = i
        i = bi
        j = nn_idx[i]
        si = size[i]
        sj = size[j]
        for m in range(n):
            if active[m] and m != i and m != j:
                v = (si * work[i, m] + sj * work[j, m]) / (si + sj)
                work[i, m] = v
                work[m, i] = v
        size[i] = si + sj
        active[j] = 0
        for m in range(n):
            work[j, m] = INFINITY
            work[m, j] = INFINITY
        for m in range(n):
            if owner[m] == j:
                owner[m] = i
        # cache maintenance: row i changed wholesale; any row whose cached
        # neighbor was i or j is stale; rows before i may gain i as neighbor
        _refresh_row(work, active, nn_dist, nn_idx, i, n)
        for m in range(n):
            if not active[m] or m == i:
                continue
            if nn_idx[m] == j or nn_idx[m] == i:
                _refresh_row(work, active, nn_dist, nn_idx, m, n)
            elif m < i:
                v = work[m, i]
                if v < nn_dist[m] or (v == nn_dist[m] and i < nn_idx[m]):
                    nn_dist[m] = v
                    nn_idx[m] = i

    reps_arr = np.flatnonzero(active_arr).astype(np.int64)
    relabel = {int(rep): idx for idx, rep in enumerate(reps_arr)}
    return np.array([relabel[int(o)] for o in owner_arr], dtype=np.int64)


cdef inline void _refresh_row(
    double[:, ::1] work,
    cnp.uint8_t[::1] active,
    double[::1] nn_dist,
    cnp.int64_t[::1] nn_idx,
    Py_ssize_t i,
    Py_ssize_t n,
) noexcept:
    """Recompute row i's nearest active neighbor among j > i (smallest j on ties)."""
    cdef Py_ssize_t j
    cdef double best = INFINITY
    cdef Py_ssize_t bj = -1
    for j in range(i + 1, n):
        if active[j] and work[i, j] < best:
            best = work[i, j]
            bj = j
    nn_dist[i] = best
    nn_idx[i] = bj

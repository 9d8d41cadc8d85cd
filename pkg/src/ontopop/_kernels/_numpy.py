"""Reference (pure numpy) implementations of the clustering kernels.

These define the contract the compiled backend mirrors: identical
update arithmetic and identical deterministic tie-breaking.

Both kernels work on the unit sphere: ``points`` rows must already be
L2-normalized and similarity means the dot product.
"""

from __future__ import annotations

import numpy as np


def lloyd(
    points: np.ndarray, centroids: np.ndarray, max_iters: int
) -> tuple[np.ndarray, int]:
    """Spherical k-means iterations.

    Assignment: argmax dot product, ties to the lowest centroid index.
    Update: normalized mean of members (a zero mean falls back to the
    cluster's first member).  A cluster left empty by an assignment
    round is re-seeded with the worst-fit point (lowest similarity to
    its own centroid, ties to the lowest point index); points whose
    cluster would become empty are not eligible.

    Returns (labels, iterations run); stops when an assignment round
    changes nothing.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    centroids = np.array(centroids, dtype=np.float64, copy=True)
    n = points.shape[0]
    k = centroids.shape[0]
    prev = np.full(n, -1, dtype=np.int64)
    labels = prev
    it = 0
    for it in range(1, max_iters + 1):
        sims = points @ centroids.T
        labels = np.argmax(sims, axis=1).astype(np.int64)
        fit = sims[np.arange(n), labels]
        counts = np.bincount(labels, minlength=k)
        for j in range(k):
            if counts[j] > 0:
                continue
            best_i = -1
            best_fit = np.inf
            for i in range(n):
                if counts[labels[i]] >= 2 and fit[i] < best_fit:
                    best_fit = fit[i]
                    best_i = i
            counts[labels[best_i]] -= 1
            labels[best_i] = j
            counts[j] = 1
        if np.array_equal(labels, prev):
            return labels, it
        prev = labels
        for j in range(k):
            members = points[labels == j]
            s = members.sum(axis=0)
            norm = np.linalg.norm(s)
            if norm == 0.0:
                centroids[j] = members[0]
            else:
                centroids[j] = s / norm
    return labels, it


def average_linkage(dist: np.ndarray, k: int) -> np.ndarray:
    """Agglomerative average-linkage cut at exactly ``k`` clusters.

    ``dist`` is the full symmetric pairwise distance matrix.  Each merge
    picks the active pair (i, j), i < j, of minimal distance, ties to
    the smallest (i, j) in row-major order, and folds j into i with the
    size-weighted average update d(i∪j, m) = (si·d(i,m) + sj·d(j,m)) / (si+sj).
    Labels number the final clusters by ascending smallest-member index.
    """
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    if dist.shape != (n, n):
        raise ValueError("distance matrix must be square")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} points")
    work = np.array(dist, copy=True)
    np.fill_diagonal(work, np.inf)
    size = np.ones(n, dtype=np.int64)
    owner = np.arange(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for _ in range(n - k):
        # Row-major argmin over a symmetric matrix hits (i, j) with i < j
        # first, so ties resolve to the smallest pair.
        flat = int(np.argmin(work))
        i, j = divmod(flat, n)
        si, sj = size[i], size[j]
        row = (si * work[i, :] + sj * work[j, :]) / (si + sj)
        work[i, :] = row
        work[:, i] = row
        work[i, i] = np.inf
        work[j, :] = np.inf
        work[:, j] = np.inf
        size[i] = si + sj
        active[j] = False
        owner[owner == j] = i
    reps = np.flatnonzero(active)
    relabel = {int(rep): idx for idx, rep in enumerate(reps)}
    return np.array([relabel[int(o)] for o in owner], dtype=np.int64)

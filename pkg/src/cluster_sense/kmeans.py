"""k-means with k-means++ seeding and Lloyd iterations under Euclidean distance.

One call is one initialization; repetition belongs to the sweep layer.
Nearest-centroid ties break toward the lower centroid index, and a cluster
that empties out is re-seeded with the point farthest from its current
centroid, so a fit is fully determined by (matrix, config).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distance import pairwise_sq_distances
from .seeding import derive_rng

_INIT_STREAM = 0x1217

# Deterministic fallback bound for re-draws that hit an already-chosen row.
_MAX_REDRAWS = 16


@dataclass(frozen=True)
class KMeansConfig:
    """k, iteration budget, convergence tolerance and seed for one fit.

    tolerance is the total squared centroid movement below which Lloyd stops,
    in squared-distance units; None selects 1e-4 times the mean per-feature
    variance of the matrix being fitted.
    """

    k: int
    max_iterations: int = 300
    tolerance: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.tolerance is not None and self.tolerance < 0:
            raise ValueError(f"tolerance must be nonnegative, got {self.tolerance}")


@dataclass(frozen=True)
class ClusteringResult:
    """Assignments, centroids and objective from one k-means run.

    inertia is the within-cluster sum of squared Euclidean distances;
    inertia_history records it after each assignment step (the final entry is
    the returned inertia).
    """

    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations: int
    converged: bool
    inertia_history: tuple[float, ...] = field(repr=False, default=())


def kmeanspp_init(matrix: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Pick k distinct rows: first uniformly, the rest D^2-weighted.

    Each subsequent center is drawn with probability proportional to the
    squared distance to the nearest chosen center, which gives rows that
    duplicate a chosen center zero weight; if every remaining row has zero
    weight there are not enough distinct values and the call fails.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    n = matrix.shape[0]
    if n < 1:
        raise ValueError("matrix must contain at least one point")
    if k < 1 or k > n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    if k == 1:
        return matrix[chosen[:1]].copy()

    d2_min = pairwise_sq_distances(matrix, matrix[chosen[:1]])[:, 0]
    for c in range(1, k):
        total = d2_min.sum()
        if total <= 0.0:
            raise ValueError(
                f"cannot pick {k} distinct centers: only {c} distinct point values available"
            )
        idx = int(rng.choice(n, p=d2_min / total))
        for _ in range(_MAX_REDRAWS):
            if d2_min[idx] > 0.0:
                break
            idx = int(rng.choice(n, p=d2_min / total))
        if d2_min[idx] <= 0.0:
            idx = int(np.argmax(d2_min))
        chosen[c] = idx
        d2_new = pairwise_sq_distances(matrix, matrix[idx : idx + 1])[:, 0]
        np.minimum(d2_min, d2_new, out=d2_min)
    return matrix[chosen].copy()


def fit(
    matrix: np.ndarray,
    config: KMeansConfig,
    initial_centers: np.ndarray | None = None,
) -> ClusteringResult:
    """Run Lloyd iterations from a k-means++ (or explicitly given) start.

    Alternates nearest-center assignment and centroid-mean updates until the
    total squared centroid movement drops to the tolerance or the iteration
    budget runs out, then recomputes assignments against the final centroids.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("matrix must be a non-empty 2-D array")
    n, d = matrix.shape
    k = config.k
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points {n}")

    tolerance = config.tolerance
    if tolerance is None:
        tolerance = 1e-4 * float(matrix.var(axis=0).mean())

    if initial_centers is None:
        rng = derive_rng(config.seed, _INIT_STREAM)
        centers = kmeanspp_init(matrix, k, rng)
    else:
        centers = np.asarray(initial_centers, dtype=np.float64).copy()
        if centers.shape != (k, d):
            raise ValueError(f"initial_centers must have shape {(k, d)}, got {centers.shape}")

    history: list[float] = []
    converged = False
    iterations = 0
    for _ in range(config.max_iterations):
        d2 = pairwise_sq_distances(matrix, centers)
        assignments = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(n), assignments].sum()))

        new_centers = np.empty_like(centers)
        counts = np.bincount(assignments, minlength=k)
        for j in range(k):
            if counts[j] > 0:
                new_centers[j] = matrix[assignments == j].mean(axis=0)
            else:
                # Re-seed an emptied cluster with the point farthest from it.
                new_centers[j] = matrix[int(np.argmax(d2[:, j]))]

        shift = float(((new_centers - centers) ** 2).sum())
        centers = new_centers
        iterations += 1
        if shift <= tolerance:
            converged = True
            break

    d2 = pairwise_sq_distances(matrix, centers)
    assignments = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), assignments].sum())
    history.append(inertia)

    return ClusteringResult(
        assignments=assignments,
        centroids=centers,
        inertia=inertia,
        iterations=iterations,
        converged=converged,
        inertia_history=tuple(history),
    )

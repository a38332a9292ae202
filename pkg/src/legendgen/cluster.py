"""Minimal deterministic DBSCAN over numpy point sets."""

from __future__ import annotations

import numpy as np

NOISE = -1


def dbscan(points: np.ndarray, eps: float, min_points: int) -> np.ndarray:
    """Label points with cluster ids (0..k-1) or -1 for noise.

    Neighborhoods are closed balls (<= eps) and include the point itself.
    Expansion order follows input order, so labels are deterministic.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = len(pts)
    labels = np.full(n, NOISE, dtype=np.int64)
    if n == 0:
        return labels
    diffs = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diffs**2).sum(axis=2))
    neighborhoods = [np.flatnonzero(dist[i] <= eps) for i in range(n)]
    visited = np.zeros(n, dtype=bool)
    cluster = 0
    for i in range(n):
        if visited[i]:
            continue
        visited[i] = True
        seeds = neighborhoods[i]
        if len(seeds) < min_points:
            continue  # stays noise unless later claimed as a border point
        labels[i] = cluster
        queue = list(seeds)
        qi = 0
        while qi < len(queue):
            j = queue[qi]
            qi += 1
            if labels[j] == NOISE:
                labels[j] = cluster
            if visited[j]:
                continue
            visited[j] = True
            nb = neighborhoods[j]
            if len(nb) >= min_points:
                labels[j] = cluster
                queue.extend(nb)
        cluster += 1
    return labels


def minmax_normalize(points: np.ndarray) -> np.ndarray:
    """Scale each axis to [0, 1]; constant axes collapse to 0."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span[span == 0] = 1.0
    return (pts - lo) / span


def fuzzy_min_points(n: int) -> int:
    """Density floor for shape clustering: max(min(0.05 * n, 20), 3)."""
    return int(max(min(0.05 * n, 20), 3))

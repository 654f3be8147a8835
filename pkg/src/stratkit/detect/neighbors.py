"""Brute-force neighbourhood counting, plus a uniform-grid index that must agree with it.

Distances are always computed as ``sqrt(sum((x - y)**2))`` on coordinate
differences so both paths round identically.
"""

from __future__ import annotations

import itertools
from collections import defaultdict

import numpy as np

from ..errors import StratError


def as_cloud(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise StratError("bad-cloud", f"expected an N x D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise StratError("bad-cloud", "non-finite coordinates")
    return X


def _chunk(n: int, d: int, budget: float = 2e7) -> int:
    return max(1, int(budget // max(1, n * d)))


def distances_from(X: np.ndarray, rows) -> np.ndarray:
    """Distance matrix block ``d(X[rows], X)``."""
    diff = X[rows][:, None, :] - X[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def iter_distance_blocks(X: np.ndarray, idx=None):
    idx = np.arange(len(X)) if idx is None else np.asarray(idx)
    step = _chunk(len(X), X.shape[1])
    for s in range(0, len(idx), step):
        rows = idx[s:s + step]
        yield rows, distances_from(X, rows)


def ball_count(X, center_index: int, r: float) -> int:
    """Number of points at distance strictly less than ``r`` (center included)."""
    X = as_cloud(X)
    if not (0 <= center_index < len(X)):
        raise StratError("index-out-of-range", f"{center_index} not in [0, {len(X)})")
    if not r > 0:
        raise StratError("bad-radius", str(r))
    d = distances_from(X, [center_index])[0]
    return int(np.count_nonzero(d < r))


def ball_counts(X, radii, idx=None) -> np.ndarray:
    """Counts ``|B_x(r)|`` for every requested center and radius, shape ``(len(idx), len(radii))``."""
    X = as_cloud(X)
    radii = np.asarray(radii, dtype=float)
    idx = np.arange(len(X)) if idx is None else np.asarray(idx)
    out = np.empty((len(idx), len(radii)), dtype=np.int64)
    pos = 0
    for rows, d in iter_distance_blocks(X, idx):
        d.sort(axis=1)
        for k in range(len(rows)):
            out[pos + k] = np.searchsorted(d[k], radii, side="left")
        pos += len(rows)
    return out


def knn_distances(X, k: int) -> np.ndarray:
    """Distances to the ``k`` nearest other points, sorted, shape ``(N, k)``."""
    X = as_cloud(X)
    k = min(k, len(X) - 1)
    out = np.empty((len(X), k))
    pos = 0
    for rows, d in iter_distance_blocks(X):
        d[np.arange(len(rows)), rows] = np.inf
        part = np.partition(d, k - 1, axis=1)[:, :k] if k > 0 else d[:, :0]
        out[pos:pos + len(rows)] = np.sort(part, axis=1)
        pos += len(rows)
    return out


def knn_indices(X, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices and distances of the ``k`` nearest other points (ties broken by index)."""
    X = as_cloud(X)
    idx_out = np.empty((len(X), k), dtype=np.int64)
    d_out = np.empty((len(X), k))
    pos = 0
    for rows, d in iter_distance_blocks(X):
        d[np.arange(len(rows)), rows] = np.inf
        order = np.argsort(d, axis=1, kind="stable")[:, :k]
        idx_out[pos:pos + len(rows)] = order
        d_out[pos:pos + len(rows)] = np.take_along_axis(d, order, axis=1)
        pos += len(rows)
    return idx_out, d_out


def diameter(X) -> float:
    X = as_cloud(X)
    best = 0.0
    for _, d in iter_distance_blocks(X):
        best = max(best, float(d.max()))
    return best


def radius_grid(X, m: int = 64) -> np.ndarray:
    """Geometric radii from the median 3rd-neighbour distance up to the diameter."""
    X = as_cloud(X)
    if len(X) < 2:
        return np.geomspace(1e-3, 1.0, m)
    k = min(3, len(X) - 1)
    lo = float(np.median(knn_distances(X, k)[:, k - 1]))
    hi = diameter(X)
    if not lo > 0:
        lo = hi * 1e-3
    return np.geomspace(lo, hi, m)


class GridIndex:
    """Uniform-grid spatial hash for exact ball counts in low dimension."""

    def __init__(self, X, cell: float):
        self.X = as_cloud(X)
        if not cell > 0:
            raise StratError("bad-radius", f"cell size {cell}")
        self.cell = float(cell)
        self.keys = np.floor(self.X / self.cell).astype(np.int64)
        buckets = defaultdict(list)
        for i, key in enumerate(map(tuple, self.keys)):
            buckets[key].append(i)
        self.buckets = {k: np.array(v) for k, v in buckets.items()}

    def candidates(self, center: np.ndarray, r: float) -> np.ndarray:
        lo = np.floor((center - r) / self.cell).astype(np.int64)
        hi = np.floor((center + r) / self.cell).astype(np.int64)
        span = int(np.prod(hi - lo + 1))
        if span > len(self.buckets):
            keys = [k for k in self.buckets if all(l <= c <= h for c, l, h in zip(k, lo, hi))]
        else:
            keys = itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
        parts = [self.buckets[k] for k in keys if k in self.buckets]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)

    def ball_count(self, center_index: int, r: float) -> int:
        c = self.X[center_index]
        cand = self.candidates(c, r)
        diff = c[None, :] - self.X[cand]
        d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        return int(np.count_nonzero(d < r))

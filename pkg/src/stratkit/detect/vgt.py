"""Volume growth transform (VGT) curves and their smoothed derivative (VGT-dot).

The VGT of a point is ``log |B_x(r)|`` against ``log r``.  On a manifold its
slope at small scales is the local dimension; in a stratified space the slope
changes as balls start to capture neighbouring strata.  Counts include the
center, so curves start at ``log 1 = 0`` or above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import StratError
from .neighbors import as_cloud, ball_counts, knn_distances, radius_grid

WINDOW_LO = 5.0
WINDOW_HI = 16.0
SMALL_LO = 2.0
SMALL_HI = 6.0


@dataclass(frozen=True, eq=False)
class VgtCurve:
    log_radii: np.ndarray
    log_counts: np.ndarray

    def __post_init__(self):
        lr = np.asarray(self.log_radii, dtype=float)
        lc = np.asarray(self.log_counts, dtype=float)
        if lr.shape != lc.shape or lr.ndim != 1:
            raise StratError("bad-curve", "log_radii and log_counts must be 1-D and equal length")
        object.__setattr__(self, "log_radii", lr)
        object.__setattr__(self, "log_counts", lc)

    @property
    def radii(self) -> np.ndarray:
        return np.exp(self.log_radii)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise StratError("empty-grid", "radius grid is empty")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise StratError("bad-grid", "radii must be positive and increasing")
    return grid


def vgt(X, center_index: int, grid) -> VgtCurve:
    X = as_cloud(X)
    grid = _check_grid(grid)
    if not (0 <= center_index < len(X)):
        raise StratError("index-out-of-range", f"{center_index} not in [0, {len(X)})")
    counts = ball_counts(X, grid, [center_index])[0]
    return VgtCurve(np.log(grid), np.log(counts))


def vgt_matrix(X, grid=None, idx=None) -> tuple[np.ndarray, np.ndarray]:
    """``(log_radii, log_counts)`` with one row of log-counts per requested point."""
    X = as_cloud(X)
    grid = radius_grid(X) if grid is None else _check_grid(grid)
    return np.log(grid), np.log(ball_counts(X, grid, idx))


def _smooth_derivative(log_r: np.ndarray, Y: np.ndarray, bandwidth: float) -> np.ndarray:
    """Local-linear Gaussian smoothing along the last axis, then central differences.

    Local-linear (rather than plain kernel averaging) reproduces straight
    lines exactly, including at the ends of the curve.
    """
    z = (log_r[:, None] - log_r[None, :]) / bandwidth
    W = np.exp(-0.5 * z * z)  # W[i, j]: weight of sample j when smoothing at i
    s0 = W.sum(1)
    s1 = W @ log_r
    s2 = W @ (log_r * log_r)
    det = s0 * s2 - s1 * s1
    # smoothed value at x_i is sum_j L[i, j] y_j
    L = W * ((s2[:, None] - s1[:, None] * log_r[None, :]) + log_r[:, None] * (s0[:, None] * log_r[None, :] - s1[:, None])) / det[:, None]
    smooth = Y @ L.T
    return np.gradient(smooth, log_r, axis=-1)


def default_bandwidth(log_r: np.ndarray) -> float:
    return 3.0 * float(np.mean(np.diff(log_r)))


def vgt_dot(curve: VgtCurve, bandwidth: float | None = None) -> np.ndarray:
    """Derivative of the smoothed VGT with respect to log-radius."""
    if len(curve.log_radii) < 5:
        raise StratError("curve-too-short", f"{len(curve.log_radii)} samples, need 5")
    bw = default_bandwidth(curve.log_radii) if bandwidth is None else bandwidth
    if not bw > 0:
        raise StratError("bad-bandwidth", str(bw))
    return _smooth_derivative(curve.log_radii, curve.log_counts, bw)


def vgt_dot_features(X, grid=None, bandwidth: float | None = None) -> np.ndarray:
    """VGT-dot of every point on a shared grid: an ``N x M`` feature matrix."""
    log_r, log_c = vgt_matrix(X, grid)
    if len(log_r) < 5:
        raise StratError("curve-too-short", f"{len(log_r)} samples, need 5")
    bw = default_bandwidth(log_r) if bandwidth is None else bandwidth
    if not bw > 0:
        raise StratError("bad-bandwidth", str(bw))
    return _smooth_derivative(log_r, log_c, bw)


def neighbour_scale(X) -> float:
    """Median distance to the 3rd nearest neighbour."""
    X = as_cloud(X)
    k = min(3, len(X) - 1)
    if k < 1:
        return 1.0
    return float(np.median(knn_distances(X, k)[:, k - 1]))


def default_window(X) -> tuple[float, float]:
    """Radius window ``[5q, 16q]`` with ``q`` the median 3rd-neighbour distance."""
    q = neighbour_scale(X)
    return WINDOW_LO * q, WINDOW_HI * q


def small_window(X) -> tuple[float, float]:
    """``[2q, 6q]``: the smallest scales that still hold a handful of neighbours."""
    q = neighbour_scale(X)
    return SMALL_LO * q, SMALL_HI * q


def _ols_slopes(log_r: np.ndarray, log_c: np.ndarray) -> np.ndarray:
    xc = log_r - log_r.mean()
    sxx = float(xc @ xc)
    if not sxx > 0:
        raise StratError("degenerate-window", "zero variance in log-radius")
    return (log_c - log_c.mean(axis=-1, keepdims=True)) @ xc / sxx


def slope(curve: VgtCurve, window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of a VGT curve over the radius window."""
    lr, lc = curve.log_radii, curve.log_counts
    if window is not None:
        keep = (lr >= np.log(window[0]) - 1e-12) & (lr <= np.log(window[1]) + 1e-12)
        lr, lc = lr[keep], lc[keep]
    if len(lr) < 5:
        raise StratError("degenerate-window", f"{len(lr)} grid points in window, need 5")
    return float(_ols_slopes(lr, lc))


def window_grid(window: tuple[float, float], m: int = 16) -> np.ndarray:
    lo, hi = window
    if not (0 < lo < hi):
        raise StratError("degenerate-window", f"{window}")
    return np.geomspace(lo, hi, m)


def local_dim_ls(X, center_index: int, window: tuple[float, float] | None = None, grid=None) -> float:
    """Local dimension at one point: OLS slope of log-count on log-radius."""
    X = as_cloud(X)
    window = default_window(X) if window is None else window
    grid = window_grid(window) if grid is None else _check_grid(grid)
    return slope(vgt(X, center_index, grid), window)


def local_dims(X, window: tuple[float, float] | None = None, grid=None, idx=None) -> np.ndarray:
    """:func:`local_dim_ls` for many points at once."""
    X = as_cloud(X)
    window = default_window(X) if window is None else window
    grid = window_grid(window) if grid is None else _check_grid(grid)
    log_r, log_c = vgt_matrix(X, grid, idx)
    keep = (log_r >= np.log(window[0]) - 1e-12) & (log_r <= np.log(window[1]) + 1e-12)
    if keep.sum() < 5:
        raise StratError("degenerate-window", f"{int(keep.sum())} grid points in window, need 5")
    return _ols_slopes(log_r[keep], log_c[:, keep])


def two_nn_dim(X) -> tuple[float, np.ndarray]:
    """TwoNN maximum-likelihood dimension and per-point ``log(r2 / r1)``."""
    X = as_cloud(X)
    if len(X) < 3:
        raise StratError("too-few-points", "TwoNN needs at least 3 points")
    d = knn_distances(X, 2)
    if np.any(d[:, 0] <= 0):
        raise StratError("duplicate-points", f"{int(np.sum(d[:, 0] <= 0))} points have a duplicate")
    log_mu = np.log(d[:, 1] / d[:, 0])
    return float(len(X) / log_mu.sum()), log_mu


def dic_feature(X, r_density: float, window: tuple[float, float] | None = None) -> np.ndarray:
    """Per-point ``(local dimension, log density count)`` features."""
    X = as_cloud(X)
    if not r_density > 0:
        raise StratError("bad-radius", str(r_density))
    density = np.log(ball_counts(X, [r_density])[:, 0])
    if len(X) < 2:
        return np.column_stack([np.zeros(len(X)), density])
    return np.column_stack([local_dims(X, window), density])

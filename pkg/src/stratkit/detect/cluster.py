"""Clustering of per-point feature matrices."""

from __future__ import annotations

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from ..errors import StratError

MAX_ITER = 100


def _features(F) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if F.ndim == 1:
        F = F.reshape(-1, 1)
    if F.ndim != 2 or len(F) == 0:
        raise StratError("bad-features", f"expected an N x M matrix, got shape {F.shape}")
    if not np.all(np.isfinite(F)):
        raise StratError("bad-features", "non-finite feature values")
    return F


def _check_k(k: int, n: int):
    if k < 1:
        raise StratError("bad-parameters", f"k={k}")
    if k > n:
        raise StratError("k-too-large", f"k={k} > N={n}")


def _sq_dists(F: np.ndarray, C: np.ndarray) -> np.ndarray:
    d = (F * F).sum(1)[:, None] - 2 * F @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _seed_centers(F: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each new center drawn with probability proportional to D^2."""
    n = len(F)
    chosen = [int(rng.integers(n))]
    d2 = _sq_dists(F, F[chosen])[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            rest = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rest[0])
        chosen.append(nxt)
        d2 = np.minimum(d2, _sq_dists(F, F[[nxt]])[:, 0])
    return F[chosen].copy()


def kmeans(F, k: int, seed: int = 0, return_inertia: bool = False):
    """Lloyd iterations from k-means++ seeds; stops when assignments stop changing."""
    F = _features(F)
    _check_k(k, len(F))
    rng = np.random.default_rng(seed)
    C = _seed_centers(F, k, rng)
    labels = None
    for _ in range(MAX_ITER):
        new = np.argmin(_sq_dists(F, C), axis=1)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            members = F[labels == j]
            if len(members):
                C[j] = members.mean(0)
            else:
                # re-seed an empty cluster at the worst-served point
                far = int(np.argmax(_sq_dists(F, C).min(1)))
                C[j] = F[far]
    labels = _canonical(labels)
    if return_inertia:
        inertia = float(sum(((F[labels == j] - F[labels == j].mean(0)) ** 2).sum() for j in np.unique(labels)))
        return labels, inertia
    return labels


def _canonical(labels: np.ndarray) -> np.ndarray:
    """Relabel clusters 0, 1, ... in order of first appearance."""
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    return rank[inv].astype(np.int64)


def agglomerative(F, k: int, linkage_method: str = "average") -> np.ndarray:
    """Average-linkage hierarchical clustering cut at ``k`` clusters."""
    F = _features(F)
    _check_k(k, len(F))
    if len(F) > 20000:
        raise StratError("too-many-points", f"N={len(F)} > 20000")
    if linkage_method not in ("average", "single", "complete", "ward"):
        raise StratError("bad-parameters", f"linkage {linkage_method!r}")
    if len(F) == 1:
        return np.zeros(1, dtype=np.int64)
    Z = linkage(F, method=linkage_method)
    return _canonical(fcluster(Z, t=k, criterion="maxclust"))


def purity(labels, truth) -> float:
    """Fraction of points whose cluster's majority truth label equals their own."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    hit = 0
    for c in np.unique(labels):
        _, counts = np.unique(truth[labels == c], return_counts=True)
        hit += counts.max()
    return hit / len(labels)


def majority(labels, mask) -> int:
    vals, counts = np.unique(np.asarray(labels)[mask], return_counts=True)
    return int(vals[np.argmax(counts)])


def standardize(F) -> np.ndarray:
    """Z-score each feature column; constant columns are only centered."""
    F = _features(F)
    sd = F.std(0)
    return (F - F.mean(0)) / np.where(sd > 0, sd, 1.0)

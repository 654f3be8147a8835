"""Geodesic embedding (ISOMAP-lite) and cosine-basis projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ..errors import StratError
from .neighbors import as_cloud, knn_indices

POWER_ITERS = 1000
POWER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Embedding:
    coords: np.ndarray
    eigenvalues: np.ndarray
    residual: float
    landmarks: np.ndarray | None = None


def knn_graph(X, k: int) -> csr_matrix:
    """Symmetrized k-NN graph with Euclidean edge weights."""
    X = as_cloud(X)
    if not 1 <= k < len(X):
        raise StratError("bad-parameters", f"k_neighbors={k} with N={len(X)}")
    idx, d = knn_indices(X, k)
    n = len(X)
    rows = np.repeat(np.arange(n), k)
    G = csr_matrix((d.ravel(), (rows, idx.ravel())), shape=(n, n))
    return G.maximum(G.T).tocsr()


def _top_eigs(B: np.ndarray, d: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Leading eigenpairs of a symmetric matrix by power iteration with deflation."""
    rng = np.random.default_rng(seed)
    n = len(B)
    vals, vecs = [], []
    A = B.copy()
    for _ in range(d):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(POWER_ITERS):
            w = A @ v
            nrm = np.linalg.norm(w)
            if nrm == 0:
                break
            w /= nrm
            lam_new = float(w @ A @ w)
            done = abs(lam_new - lam) <= POWER_TOL * max(1.0, abs(lam_new))
            v, lam = w, lam_new
            if done:
                break
        # fix the sign so the largest-magnitude entry is positive
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        vals.append(lam)
        vecs.append(v)
        A = A - lam * np.outer(v, v)
    return np.array(vals), np.column_stack(vecs)


def _double_center(D2: np.ndarray) -> np.ndarray:
    return -0.5 * (D2 - D2.mean(0)[None, :] - D2.mean(1)[:, None] + D2.mean())


def _residual(geo: np.ndarray, emb: np.ndarray) -> float:
    iu = np.triu_indices(len(geo), 1)
    a = geo[iu]
    b = np.sqrt(((emb[:, None, :] - emb[None, :, :]) ** 2).sum(-1))[iu]
    if a.std() == 0 or b.std() == 0:
        return 1.0
    return float(1.0 - np.corrcoef(a, b)[0, 1] ** 2)


def isomap_lite(X, k_neighbors: int, d_out: int, n_landmarks: int | None = None, seed: int = 0) -> Embedding:
    """Geodesic multidimensional scaling.

    With ``n_landmarks`` the scaling runs on a landmark subset chosen by
    farthest-point sampling and the other points are placed by distance-based
    triangulation against the landmarks.
    """
    X = as_cloud(X)
    n = len(X)
    if d_out < 1:
        raise StratError("bad-parameters", f"d_out={d_out}")
    G = knn_graph(X, min(k_neighbors, n - 1)) if k_neighbors >= 1 else None
    if G is None:
        raise StratError("bad-parameters", f"k_neighbors={k_neighbors}")
    ncomp, _ = connected_components(G, directed=False)
    if ncomp > 1:
        raise StratError("graph-disconnected", f"{ncomp} components", witness=ncomp)
    if k_neighbors < d_out + 1:
        raise StratError("bad-parameters", f"k_neighbors={k_neighbors} < d_out + 1")
    if n_landmarks is None or n_landmarks >= n:
        geo = shortest_path(G, method="D", directed=False)
        vals, vecs = _top_eigs(_double_center(geo ** 2), d_out, seed)
        coords = vecs * np.sqrt(np.maximum(vals, 0.0))
        return Embedding(coords, vals, _residual(geo, coords))
    if n_landmarks < d_out + 1:
        raise StratError("bad-parameters", f"n_landmarks={n_landmarks} < d_out + 1")
    lm = _farthest_points(G, n_landmarks, seed)
    geo_l = shortest_path(G, method="D", directed=False, indices=lm)  # (m, n)
    D2 = geo_l[:, lm] ** 2
    vals, vecs = _top_eigs(_double_center(D2), d_out, seed)
    vals_pos = np.maximum(vals, 1e-300)
    # triangulation: x = -1/2 L^# (delta_x - mean_delta)
    pinv = vecs / np.sqrt(vals_pos)[None, :]
    mean_d2 = D2.mean(1)
    coords = -0.5 * (geo_l ** 2 - mean_d2[:, None]).T @ pinv
    sub = lm
    return Embedding(coords, vals, _residual(geo_l[:, sub], coords[sub]), landmarks=lm)


def _farthest_points(G: csr_matrix, m: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = G.shape[0]
    chosen = [int(rng.integers(n))]
    dmin = shortest_path(G, method="D", directed=False, indices=chosen[0])
    for _ in range(1, m):
        nxt = int(np.argmax(dmin))
        chosen.append(nxt)
        dmin = np.minimum(dmin, shortest_path(G, method="D", directed=False, indices=nxt))
    return np.array(chosen)


def dct_matrix(d_out: int, D: int) -> np.ndarray:
    """First ``d_out`` rows of the orthonormal type-II cosine basis of size ``D``."""
    k = np.arange(d_out)[:, None]
    n = np.arange(D)[None, :]
    M = np.cos(np.pi * (2 * n + 1) * k / (2 * D)) * np.sqrt(2.0 / D)
    M[0] /= np.sqrt(2.0)
    return M


def dct_project(X, d_out: int, rescale: bool = True) -> np.ndarray:
    """Project onto the leading cosine basis vectors.

    ``rescale`` multiplies by ``sqrt(D / d_out)`` so squared lengths are kept
    on average for generic inputs; it is a no-op when ``d_out == D``.
    """
    X = as_cloud(X)
    D = X.shape[1]
    if d_out < 1:
        raise StratError("bad-parameters", f"d_out={d_out}")
    if d_out > D:
        raise StratError("d_out-too-large", f"d_out={d_out} > D={D}")
    Y = X @ dct_matrix(d_out, D).T
    return Y * np.sqrt(D / d_out) if rescale else Y

"""Synthetic stratified point clouds with ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import StratError


@dataclass(frozen=True, eq=False)
class Sample:
    points: np.ndarray
    labels: np.ndarray  # stratum name per point
    dims: np.ndarray  # ground-truth local dimension per point
    probes: dict = field(default_factory=dict)  # probe name -> point index
    params: dict = field(default_factory=dict)  # extra ground truth (e.g. arc length)

    def __len__(self) -> int:
        return len(self.points)


def _check(n: int, minimum: int = 10):
    if n < minimum:
        raise StratError("bad-parameters", f"n={n} < {minimum}")


def gen_square(n: int, seed: int = 0) -> Sample:
    _check(n)
    rng = np.random.default_rng(seed)
    return Sample(rng.random((n, 2)), np.full(n, "square"), np.full(n, 2))


def gen_segment(n: int, L: float = 1.0, seed: int = 0) -> Sample:
    _check(n)
    rng = np.random.default_rng(seed)
    t = rng.random(n) * L
    return Sample(np.column_stack([t, np.zeros(n)]), np.full(n, "segment"), np.full(n, 1), params={"t": t})


def gen_circle(n: int, seed: int = 0, radius: float = 1.0) -> Sample:
    _check(n)
    rng = np.random.default_rng(seed)
    th = rng.random(n) * 2 * np.pi
    pts = radius * np.column_stack([np.cos(th), np.sin(th)])
    return Sample(pts, np.full(n, "circle"), np.full(n, 1), params={"angle": th})


def gen_segment_tube(n: int, L: float = 1.0, r: float = 0.25, seed: int = 0) -> Sample:
    """Uniform samples of the radius-``r`` tube around ``[0, L] x {0}``.

    Points whose projection falls inside the segment are labelled ``tube``,
    the rest ``cap``.
    """
    _check(n)
    if L < 0 or not r > 0:
        raise StratError("bad-parameters", f"L={L}, r={r}")
    rng = np.random.default_rng(seed)
    out = np.empty((0, 2))
    while len(out) < n:
        X = np.column_stack([rng.uniform(-r, L + r, 2 * n), rng.uniform(-r, r, 2 * n)])
        proj = np.clip(X[:, 0], 0, L)
        d = np.hypot(X[:, 0] - proj, X[:, 1])
        out = np.vstack([out, X[d <= r]])
    out = out[:n]
    labels = np.where((out[:, 0] >= 0) & (out[:, 0] <= L), "tube", "cap")
    return Sample(out, labels, np.full(n, 2))


CORRIDOR_X = (2.0, 6.0)
ROOM_FRACTION = 0.5


def corridor_y(x):
    return 1.0 + 0.5 * np.sin(3 * np.pi * np.asarray(x))


def _corridor_arclength(n_grid: int = 20001):
    x = np.linspace(*CORRIDOR_X, n_grid)
    dy = 1.5 * np.pi * np.cos(3 * np.pi * x)
    speed = np.sqrt(1 + dy * dy)
    s = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(x))])
    return x, s


def gen_room_corridor(n: int, noise: float = 0.01, seed: int = 0) -> Sample:
    """Room ``[0,2]^2`` with a sine corridor attached at ``a = (2, 1)``.

    The corridor is ``y = 1 + 0.5 sin(3 pi x)`` for ``x`` in ``[2, 6]``, sampled
    uniformly in arc length.  Probes (exact, noise free, stored first):
    ``a`` the junction, ``b`` the room center, ``c`` the corridor minimum
    nearest the room, ``(2.5, 0.5)``.
    """
    _check(n)
    if noise < 0:
        raise StratError("bad-parameters", f"noise={noise}")
    rng = np.random.default_rng(seed)
    probes = np.array([[2.0, 1.0], [1.0, 1.0], [2.5, 0.5]])
    m = n - len(probes)
    n_room = int(round(ROOM_FRACTION * m))
    n_corr = m - n_room
    room = rng.random((n_room, 2)) * 2.0
    xg, sg = _corridor_arclength()
    s = rng.random(n_corr) * sg[-1]
    cx = np.interp(s, sg, xg)
    corr = np.column_stack([cx, corridor_y(cx)])
    body = np.vstack([room, corr])
    if noise > 0:
        body = body + rng.normal(scale=noise, size=body.shape)
    pts = np.vstack([probes, body])
    labels = np.array(["junction", "room", "corridor"] + ["room"] * n_room + ["corridor"] * n_corr, dtype=object)
    near_a = np.hypot(pts[:, 0] - 2.0, pts[:, 1] - 1.0) < 0.1
    labels[near_a] = "junction"
    labels = labels.astype(str)
    dims = np.where(labels == "corridor", 1, np.where(labels == "room", 2, 0))
    return Sample(pts, labels, dims, probes={"a": 0, "b": 1, "c": 2})


def gen_hourglass(n: int, seed: int = 0, width: float = 1.0) -> Sample:
    """Two filled triangles ``{|y| <= |x| <= width}`` meeting at the origin.

    Labels: ``neck`` within 0.1 of the origin, otherwise ``left``/``right`` lobe.
    The origin itself is stored first as probe ``neck``.
    """
    _check(n)
    rng = np.random.default_rng(seed)
    m = n - 1
    # uniform in the right triangle: x = width*sqrt(u), y in [-x, x]
    x = width * np.sqrt(rng.random(m))
    y = (2 * rng.random(m) - 1) * x
    side = np.where(rng.random(m) < 0.5, -1.0, 1.0)
    pts = np.vstack([[0.0, 0.0], np.column_stack([side * x, y])])
    labels = np.where(pts[:, 0] < 0, "left", "right").astype(object)
    labels[np.hypot(pts[:, 0], pts[:, 1]) < 0.1] = "neck"
    labels = labels.astype(str)
    dims = np.where(labels == "neck", 0, 2)
    dims[1:][np.hypot(pts[1:, 0], pts[1:, 1]) >= 0.1] = 2
    return Sample(pts, labels, dims, probes={"neck": 0})


def gen_half_cylinder(n: int, radius: float = 1.0, width: float = 1.0, seed: int = 0) -> Sample:
    """Uniform samples of ``{(R cos t, R sin t, z) : t in [0, pi], z in [0, width]}``.

    ``params['arc']`` holds the true arc-length coordinate ``R t``.
    """
    _check(n)
    rng = np.random.default_rng(seed)
    t = rng.random(n) * np.pi
    z = rng.random(n) * width
    pts = np.column_stack([radius * np.cos(t), radius * np.sin(t), z])
    return Sample(pts, np.full(n, "strip"), np.full(n, 2), params={"arc": radius * t, "z": z})


def gen_line3d(n: int, seed: int = 0, direction=(1.0, 2.0, 2.0)) -> Sample:
    _check(n)
    rng = np.random.default_rng(seed)
    u = np.asarray(direction, dtype=float)
    u /= np.linalg.norm(u)
    s = np.sort(rng.random(n)) * 3.0
    return Sample(s[:, None] * u[None, :], np.full(n, "line"), np.full(n, 1), params={"arc": s})


GENERATORS = {
    "square": gen_square,
    "segment": gen_segment,
    "circle": gen_circle,
    "segment_tube": gen_segment_tube,
    "room_corridor": gen_room_corridor,
    "hourglass": gen_hourglass,
    "half_cylinder": gen_half_cylinder,
    "line3d": gen_line3d,
}

"""Shapes with exact distance functions, tubes, and stratum-membership predicates.

For a stratum ``S`` with tube radius ``mu``, the *close-to* atom is
``d_S <= mu`` (robustness ``mu - d(S, x)``) and the *away-from* atom is
``d_S >= 0`` (robustness ``d(S, x)``).  Membership of ``x`` in stratum ``i``
is decided by the conjunction of close-to-``i`` with away-from every stratum
below ``i`` in the frontier order; a point is a member when the
conjunction's robustness is strictly positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import StratError
from .poset import Poset
from .stl import LEQ, GEQ, And, Atom, Formula, FunctionRegistry, robustness
from .trace import Trace


# -- shapes ------------------------------------------------------------------


class Shape:
    kind = "shape"
    dim: int

    def dist(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def reach(self) -> float:
        # convex primitives have infinite reach
        return math.inf

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class Point(Shape):
    p: np.ndarray
    kind = "point"

    def __post_init__(self):
        object.__setattr__(self, "p", _vec(self.p))

    @property
    def dim(self):
        return len(self.p)

    def dist(self, X):
        return np.linalg.norm(X - self.p, axis=-1)

    def bbox(self):
        return self.p.copy(), self.p.copy()

    def sample(self, n, rng):
        return np.tile(self.p, (n, 1))

    def to_dict(self):
        return {"kind": "point", "p": self.p.tolist()}


@dataclass(frozen=True, eq=False)
class Segment(Shape):
    a: np.ndarray
    b: np.ndarray
    kind = "segment"

    def __post_init__(self):
        object.__setattr__(self, "a", _vec(self.a))
        object.__setattr__(self, "b", _vec(self.b))
        if self.a.shape != self.b.shape or not np.any(self.a != self.b):
            raise StratError("bad-shape", "segment needs two distinct endpoints of equal dimension")

    @property
    def dim(self):
        return len(self.a)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def dist(self, X):
        ab = self.b - self.a
        t = np.clip(((X - self.a) @ ab) / (ab @ ab), 0.0, 1.0)
        return np.linalg.norm(X - (self.a + t[..., None] * ab), axis=-1)

    def bbox(self):
        return np.minimum(self.a, self.b), np.maximum(self.a, self.b)

    def sample(self, n, rng):
        t = rng.random(n)[:, None]
        return self.a + t * (self.b - self.a)

    def to_dict(self):
        return {"kind": "segment", "a": self.a.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True, eq=False)
class Disk(Shape):
    """Closed ball."""

    center: np.ndarray
    radius: float
    kind = "disk"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.radius > 0:
            raise StratError("bad-shape", f"radius {self.radius}")

    @property
    def dim(self):
        return len(self.center)

    def dist(self, X):
        return np.maximum(np.linalg.norm(X - self.center, axis=-1) - self.radius, 0.0)

    def bbox(self):
        return self.center - self.radius, self.center + self.radius

    def sample(self, n, rng):
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = self.radius * rng.random(n) ** (1.0 / self.dim)
        return self.center + g * rad[:, None]

    def to_dict(self):
        return {"kind": "disk", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Circle(Shape):
    """Round sphere (a circle in the plane)."""

    center: np.ndarray
    radius: float
    kind = "circle"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.radius > 0:
            raise StratError("bad-shape", f"radius {self.radius}")

    @property
    def dim(self):
        return len(self.center)

    def dist(self, X):
        return np.abs(np.linalg.norm(X - self.center, axis=-1) - self.radius)

    def bbox(self):
        return self.center - self.radius, self.center + self.radius

    def reach(self):
        return float(self.radius)

    def sample(self, n, rng):
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return self.center + self.radius * g

    def to_dict(self):
        return {"kind": "circle", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Box(Shape):
    lo: np.ndarray
    hi: np.ndarray
    kind = "box"

    def __post_init__(self):
        object.__setattr__(self, "lo", _vec(self.lo))
        object.__setattr__(self, "hi", _vec(self.hi))
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise StratError("bad-shape", "box needs lo < hi in every coordinate")

    @property
    def dim(self):
        return len(self.lo)

    def dist(self, X):
        return np.linalg.norm(np.maximum(np.maximum(self.lo - X, X - self.hi), 0.0), axis=-1)

    def bbox(self):
        return self.lo.copy(), self.hi.copy()

    def sample(self, n, rng):
        return self.lo + rng.random((n, self.dim)) * (self.hi - self.lo)

    def to_dict(self):
        return {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class Union(Shape):
    members: tuple[Shape, ...]
    kind = "union"

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members or len({m.dim for m in self.members}) != 1:
            raise StratError("bad-shape", "union needs members of one dimension")

    @property
    def dim(self):
        return self.members[0].dim

    def dist(self, X):
        return np.min([m.dist(X) for m in self.members], axis=0)

    def bbox(self):
        los, his = zip(*(m.bbox() for m in self.members))
        return np.min(los, axis=0), np.max(his, axis=0)

    def reach(self):
        raise StratError("unsupported-shape", "reach of a union is not tabulated")

    def sample(self, n, rng):
        which = rng.integers(len(self.members), size=n)
        out = np.empty((n, self.dim))
        for k, m in enumerate(self.members):
            idx = np.nonzero(which == k)[0]
            if len(idx):
                out[idx] = m.sample(len(idx), rng)
        return out

    def to_dict(self):
        return {"kind": "union", "members": [m.to_dict() for m in self.members]}


def shape_from_dict(d: Mapping) -> Shape:
    kind = d.get("kind")
    try:
        if kind == "point":
            return Point(d["p"])
        if kind == "segment":
            return Segment(d["a"], d["b"])
        if kind == "disk":
            return Disk(d["center"], float(d["radius"]))
        if kind == "circle":
            return Circle(d["center"], float(d["radius"]))
        if kind == "box":
            return Box(d["lo"], d["hi"])
        if kind == "union":
            return Union(tuple(shape_from_dict(m) for m in d["members"]))
    except KeyError as exc:
        raise StratError("bad-shape", f"{kind}: missing {exc}") from None
    raise StratError("bad-shape", f"unknown kind {kind!r}")


def dist(shape: Shape, x) -> float | np.ndarray:
    """Euclidean distance from ``x`` (one point or rows of points) to the shape."""
    X = np.asarray(x, dtype=float)
    if X.shape[-1] != shape.dim:
        raise StratError("dimension-mismatch", f"point dim {X.shape[-1]} vs shape dim {shape.dim}")
    out = shape.dist(X)
    return float(out) if X.ndim == 1 else out


def reach(shape: Shape) -> float:
    return shape.reach()


# -- tubes -------------------------------------------------------------------


def tube_volume_exact(L: float, r: float) -> float:
    """Area of the radius-``r`` tube around a planar segment of length ``L``."""
    if L < 0 or not r > 0:
        raise StratError("bad-parameters", f"L={L}, r={r}")
    return 2 * r * L + math.pi * r * r


def tube_volume_mc(shape: Shape, r: float, n: int, seed: int = 0, chunk: int = 1 << 18) -> tuple[float, float]:
    """Monte Carlo volume of ``{x : d(S, x) <= r}``; returns (estimate, standard error)."""
    lo, hi = shape.bbox()
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise StratError("unbounded-shape", shape.kind)
    lo, hi = lo - r, hi + r
    vol = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    hits = 0
    left = n
    while left > 0:
        m = min(chunk, left)
        X = lo + rng.random((m, shape.dim)) * (hi - lo)
        hits += int(np.count_nonzero(shape.dist(X) <= r))
        left -= m
    p = hits / n
    return vol * p, vol * math.sqrt(max(p * (1 - p), 0.0) / n) if n > 1 else vol


# -- strata ------------------------------------------------------------------


def clearance(shape: Shape, lo, hi) -> float:
    """Distance from the shape to the boundary of the box ``[lo, hi]``."""
    slo, shi = shape.bbox()
    return float(min(np.min(slo - np.asarray(lo, float)), np.min(np.asarray(hi, float) - shi)))


def max_mu(shape: Shape, lo, hi) -> float:
    return min(shape.reach(), clearance(shape, lo, hi))


@dataclass(frozen=True, eq=False)
class StratumSpec:
    id: str
    shape: Shape
    mu: float
    box_lo: np.ndarray
    box_hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "box_lo", _vec(self.box_lo))
        object.__setattr__(self, "box_hi", _vec(self.box_hi))
        validate_spec(self)

    @property
    def fn(self) -> str:
        return f"d_{self.id}"


def validate_spec(spec: StratumSpec) -> None:
    s = spec.shape
    if len(spec.box_lo) != s.dim:
        raise StratError("invalid-spec", f"{spec.id}: box and shape dimensions differ")
    c = clearance(s, spec.box_lo, spec.box_hi)
    if c < 0:
        raise StratError("invalid-spec", f"{spec.id}: shape not inside the bounding box")
    if not spec.mu > 0:
        raise StratError("invalid-spec", f"{spec.id}: mu must be positive")
    limit = min(c, s.reach() if s.kind != "union" else math.inf)
    if spec.mu > limit + 1e-12:
        raise StratError("invalid-spec", f"{spec.id}: mu={spec.mu} exceeds min(reach, clearance)={limit}")


def _register(spec: StratumSpec, reg: FunctionRegistry | None) -> str:
    if reg is not None:
        shape = spec.shape
        reg.register(spec.fn, lambda s: shape.dist(s))
    return spec.fn


def close_to(spec: StratumSpec, reg: FunctionRegistry | None = None) -> Atom:
    validate_spec(spec)
    return Atom(_register(spec, reg), LEQ, spec.mu)


def away_from(spec: StratumSpec, reg: FunctionRegistry | None = None) -> Atom:
    validate_spec(spec)
    return Atom(_register(spec, reg), GEQ, 0.0)


@dataclass(frozen=True, eq=False)
class StratifiedFamily:
    strata: Mapping[str, StratumSpec]
    frontier: Poset

    def __post_init__(self):
        if set(self.strata) != set(self.frontier.elements):
            raise StratError("invalid-family", "frontier elements must match stratum ids")

    def below(self, i: str) -> list[str]:
        return [j for j in self.frontier.elements if self.frontier.lt(j, i)]

    @classmethod
    def from_dict(cls, d: Mapping) -> "StratifiedFamily":
        shapes = {s["id"]: shape_from_dict(s["shape"]) for s in d["strata"]}
        if "box" in d:
            lo, hi = d["box"]["lo"], d["box"]["hi"]
        else:
            los, his = zip(*(s.bbox() for s in shapes.values()))
            lo, hi = np.min(los, axis=0) - 1.0, np.max(his, axis=0) + 1.0
        strata = {
            s["id"]: StratumSpec(s["id"], shapes[s["id"]], float(s["mu"]), lo, hi) for s in d["strata"]
        }
        covers = d.get("frontier", {}).get("covers", [])
        return cls(strata, Poset(list(strata), [tuple(c) for c in covers]))

    def to_dict(self) -> dict:
        any_spec = next(iter(self.strata.values()))
        return {
            "strata": [{"id": k, "shape": s.shape.to_dict(), "mu": s.mu} for k, s in self.strata.items()],
            "frontier": {"covers": [list(c) for c in self.frontier.covers]},
            "box": {"lo": any_spec.box_lo.tolist(), "hi": any_spec.box_hi.tolist()},
        }

    def registry(self) -> FunctionRegistry:
        reg = FunctionRegistry()
        for spec in self.strata.values():
            _register(spec, reg)
        return reg


def membership_formula(fam: StratifiedFamily, i: str, reg: FunctionRegistry | None = None) -> Formula:
    if i not in fam.strata:
        raise StratError("unknown-stratum", repr(i))
    f: Formula = close_to(fam.strata[i], reg)
    for j in fam.below(i):
        f = And(f, away_from(fam.strata[j], reg))
    return f


def decide_stratum(fam: StratifiedFamily, i: str, x) -> tuple[bool, float]:
    """Evaluate the membership formula of stratum ``i`` at the point ``x``."""
    reg = FunctionRegistry()
    phi = membership_formula(fam, i, reg)
    x = _vec(x)
    rho = robustness(phi, Trace(np.zeros(1), x.reshape(1, -1)), 0, reg)
    return rho > 0, rho


def stratum_robustness(fam: StratifiedFamily, X: np.ndarray) -> dict[str, np.ndarray]:
    """Membership robustness of every stratum at every row of ``X`` (vectorized)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d = {k: s.shape.dist(X) for k, s in fam.strata.items()}
    out = {}
    for i, spec in fam.strata.items():
        rho = spec.mu - d[i]
        for j in fam.below(i):
            rho = np.minimum(rho, d[j])
        out[i] = rho
    return out


def assign_stratum(fam: StratifiedFamily, x) -> str | None:
    """The unique highest stratum whose membership formula holds at ``x``, else None."""
    rob = stratum_robustness(fam, _vec(x))
    members = [i for i, r in rob.items() if r[0] > 0]
    tops = [i for i in members if not any(fam.frontier.lt(i, j) for j in members)]
    return tops[0] if len(tops) == 1 else None


def _grid(lo: np.ndarray, hi: np.ndarray, density: float) -> np.ndarray:
    h = density ** (-1.0 / len(lo))
    axes = [np.linspace(a, b, max(2, int(np.ceil((b - a) / h)) + 1)) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def predicate_poset_check(fam: StratifiedFamily, density: float = 1e3, tol: float = 1e-12):
    """Check that close-to regions are nested along the frontier order.

    For every ``j < i`` the satisfaction region of close-to-``j`` must lie in
    that of close-to-``i`` (lower strata have the smaller regions).  Returns
    ``(True, None)`` or ``(False, (j, i, point))``.
    """
    spec0 = next(iter(fam.strata.values()))
    X = _grid(spec0.box_lo, spec0.box_hi, density)
    alpha = {k: s.mu - s.shape.dist(X) for k, s in fam.strata.items()}
    for j, i in fam.frontier.relations():
        bad = np.nonzero((alpha[j] >= -tol) & (alpha[i] < -tol))[0]
        if len(bad):
            return False, (j, i, X[bad[0]].tolist())
    return True, None


def check_frontier(fam: StratifiedFamily, n: int = 200, seed: int = 0, tol: float = 1e-9):
    """Sample each lower stratum and confirm it lies in the closure of every stratum above."""
    rng = np.random.default_rng(seed)
    for j, i in fam.frontier.relations():
        pts = fam.strata[j].shape.sample(n, rng)
        d = fam.strata[i].shape.dist(pts)
        if np.any(d > tol):
            return False, (j, i, pts[int(np.argmax(d))].tolist())
    return True, None


def interval_family(length: float = 1.0, mu: float = 0.4, mu_end: float | None = None,
                    margin: float = 1.0) -> StratifiedFamily:
    """Segment ``[0, length] x {0}`` stratified as open interval over its two endpoints."""
    a, b = np.array([0.0, 0.0]), np.array([length, 0.0])
    lo, hi = np.array([-margin, -margin]), np.array([length + margin, margin])
    mu_end = mu if mu_end is None else mu_end
    strata = {
        "a": StratumSpec("a", Point(a), mu_end, lo, hi),
        "b": StratumSpec("b", Point(b), mu_end, lo, hi),
        "ab": StratumSpec("ab", Segment(a, b), mu, lo, hi),
    }
    return StratifiedFamily(strata, Poset(["a", "b", "ab"], [("a", "ab"), ("b", "ab")]))

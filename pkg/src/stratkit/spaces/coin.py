"""Space-time coin collection game.

Points are ``(t, y)`` with the light-cone order ``p <= q`` iff ``t_p <= t_q``
and ``|y_q - y_p| <= t_q - t_p``.  In null coordinates ``u = t + y``,
``v = t - y`` this is the product order, so joins are coordinatewise maxima.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, NamedTuple

import numpy as np

from ..errors import StratError
from ..poset import OrderComplex, Poset, order_complex
from ..trace import Trace

TOL = 1e-9
START = "S"


class SpaceTimePoint(NamedTuple):
    t: float
    y: float


def lightcone_leq(p, q, tol: float = 1e-12) -> bool:
    return p[0] <= q[0] + tol and abs(q[1] - p[1]) <= (q[0] - p[0]) + tol


def cone_join(p, q) -> SpaceTimePoint:
    """Least upper bound of two points in the light-cone order."""
    if lightcone_leq(p, q, 0.0):
        return SpaceTimePoint(*q)
    if lightcone_leq(q, p, 0.0):
        return SpaceTimePoint(*p)
    u = max(p[0] + p[1], q[0] + q[1])
    v = max(p[0] - p[1], q[0] - q[1])
    return SpaceTimePoint((u + v) / 2, (u - v) / 2)


@dataclass(frozen=True)
class CoinConfig:
    coins: tuple[tuple[str, SpaceTimePoint], ...]
    horizon: float

    def __post_init__(self):
        coins = tuple((str(lab), SpaceTimePoint(float(p[0]), float(p[1]))) for lab, p in self.coins)
        object.__setattr__(self, "coins", coins)
        labels = [lab for lab, _ in coins]
        if len(set(labels)) != len(labels) or START in labels:
            raise StratError("config-invalid", f"labels must be unique and not {START!r}: {labels}")
        for lab, p in coins:
            if not (0 < p.t < self.horizon):
                raise StratError("config-invalid", f"coin {lab} at t={p.t} outside (0, {self.horizon})")
            if abs(p.y) > p.t + TOL:
                raise StratError("config-invalid", f"coin {lab} outside the start cone")

    @property
    def labels(self) -> list[str]:
        return [lab for lab, _ in self.coins]

    def point(self, label: str) -> SpaceTimePoint:
        if label == START:
            return SpaceTimePoint(0.0, 0.0)
        return dict(self.coins)[label]

    def min_spacing(self) -> float:
        pts = [SpaceTimePoint(0.0, 0.0)] + [p for _, p in self.coins]
        best = self.horizon
        for p, q in itertools.combinations(pts, 2):
            best = min(best, float(np.hypot(p.t - q.t, p.y - q.y)))
        return best

    def to_dict(self) -> dict:
        return {
            "coins": [{"label": lab, "t": p.t, "y": p.y} for lab, p in self.coins],
            "horizon": self.horizon,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CoinConfig":
        try:
            coins = tuple((c["label"], SpaceTimePoint(c["t"], c["y"])) for c in data["coins"])
            return cls(coins, float(data["horizon"]))
        except (KeyError, TypeError) as exc:
            raise StratError("config-invalid", f"missing field {exc}") from None


def default_coin_config() -> CoinConfig:
    """The frozen five-coin configuration shipped with the package."""
    text = resources.files("stratkit").joinpath("data/default5.json").read_text()
    return CoinConfig.from_dict(json.loads(text))


def label_id(cfg: CoinConfig, labels) -> str:
    labels = set(labels) | {START}
    ordered = [START] + [lab for lab in cfg.labels if lab in labels]
    return "{" + ",".join(ordered) + "}"


@dataclass(frozen=True)
class OverlapPoset:
    poset: Poset
    apexes: Mapping[str, SpaceTimePoint]
    members: Mapping[str, frozenset[str]]

    def __len__(self) -> int:
        return len(self.poset)

    def to_dict(self) -> dict:
        d = self.poset.to_dict()
        d["apexes"] = {k: {"t": v.t, "y": v.y} for k, v in self.apexes.items()}
        return d


def _label_poset(cfg: CoinConfig, sets) -> Poset:
    sets = sorted(set(sets), key=lambda s: (len(s), label_id(cfg, s)))
    ids = [label_id(cfg, s) for s in sets]
    rel = [(label_id(cfg, a), label_id(cfg, b)) for a, b in itertools.permutations(sets, 2) if a < b]
    return Poset.from_relations(ids, rel)


def _apex(cfg: CoinConfig, sigma) -> SpaceTimePoint:
    apex = SpaceTimePoint(0.0, 0.0)
    for lab in sigma:
        apex = cone_join(apex, cfg.point(lab))
    return apex


def overlap_poset(cfg: CoinConfig) -> OverlapPoset:
    """Label sets whose cone intersection is nonempty within the horizon and maximal.

    ``U_sigma = U_tau`` for some strict superset ``tau`` exactly when another
    coin lies below the apex of ``sigma``, so the kept sets are the closed ones.
    """
    labels = cfg.labels
    if len(labels) > 12:
        raise StratError("config-invalid", "at most 12 coins")
    kept = {}
    for k in range(len(labels) + 1):
        for sigma in itertools.combinations(labels, k):
            apex = _apex(cfg, sigma)
            if apex.t > cfg.horizon + TOL:
                continue
            below = {lab for lab in labels if lightcone_leq(cfg.point(lab), apex, TOL)}
            if below == set(sigma):
                kept[frozenset(sigma)] = apex
    poset = _label_poset(cfg, kept)
    return OverlapPoset(
        poset,
        {label_id(cfg, s): a for s, a in kept.items()},
        {label_id(cfg, s): frozenset(s) | {START} for s in kept},
    )


def overlap_poset_bruteforce(cfg: CoinConfig, resolution: float) -> OverlapPoset:
    """Label sets realized on a space-time grid; oracle for :func:`overlap_poset`."""
    if resolution <= 0:
        raise StratError("bad-resolution", str(resolution))
    if cfg.coins and resolution > cfg.min_spacing() / 10:
        raise StratError(
            "resolution-too-coarse",
            f"{resolution} > spacing/10 = {cfg.min_spacing() / 10}",
        )
    T = cfg.horizon
    nt = int(np.floor(T / resolution + TOL))
    ts = np.arange(nt + 1) * resolution
    ys = np.arange(-nt, nt + 1) * resolution
    tt, yy = np.meshgrid(ts, ys, indexing="ij")
    keep = np.abs(yy) <= tt + TOL
    tt, yy = tt[keep], yy[keep]
    mask = np.zeros(tt.shape, dtype=np.int64)
    for i, (_, c) in enumerate(cfg.coins):
        inside = (c.t <= tt + TOL) & (np.abs(yy - c.y) <= (tt - c.t) + TOL)
        mask |= inside.astype(np.int64) << i
    realized = {}
    labels = cfg.labels
    for m in np.unique(mask):
        s = frozenset(labels[i] for i in range(len(labels)) if (int(m) >> i) & 1)
        realized[s] = _apex(cfg, s)
    poset = _label_poset(cfg, realized)
    return OverlapPoset(
        poset,
        {label_id(cfg, s): a for s, a in realized.items()},
        {label_id(cfg, s): frozenset(s) | {START} for s in realized},
    )


def strat_label(cfg: CoinConfig, p) -> str:
    """Overlap-poset element of a point: every coin (and S) below it."""
    t, y = float(p[0]), float(p[1])
    if t < -TOL or abs(y) > t + TOL or t > cfg.horizon + TOL:
        raise StratError("point-outside-domain", f"({t}, {y})")
    return label_id(cfg, [lab for lab, c in cfg.coins if lightcone_leq(c, (t, y), TOL)])


def collection_poset(cfg: CoinConfig) -> Poset:
    """Coins ordered by the light cone (opposite of future-cone inclusion)."""
    rel = [(a, b) for (a, p), (b, q) in itertools.permutations(cfg.coins, 2) if lightcone_leq(p, q, TOL)]
    return Poset.from_relations(cfg.labels, rel)


def traj_chain(cfg: CoinConfig, trace: Trace) -> tuple[str, ...]:
    """Coins a speed-admissible trace passes through, in time order."""
    t = trace.times
    y = trace.states[:, 0]
    dy = np.abs(np.diff(y))
    dt = np.diff(t)
    bad = np.nonzero(dy > dt + 1e-12)[0]
    if len(bad):
        k = int(bad[0])
        raise StratError("speed-violation", f"step {k}: |dy|={dy[k]} > dt={dt[k]}", witness=k)
    visited = []
    for lab, c in cfg.coins:
        if t[0] - TOL <= c.t <= t[-1] + TOL:
            yc = float(np.interp(c.t, t, y))
            if abs(yc - c.y) <= TOL:
                visited.append((c.t, lab))
    chain = tuple(lab for _, lab in sorted(visited))
    for a, b in zip(chain, chain[1:]):
        assert lightcone_leq(cfg.point(a), cfg.point(b), TOL)
    return chain


def collection_order_complex(cfg: CoinConfig, max_len: int = 2) -> OrderComplex:
    return order_complex(collection_poset(cfg), max_len)

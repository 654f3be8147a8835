"""Stratifying sampled trajectories by the times they spend in a target set.

A trace maps to the set of sample times at which it lies in the (closed)
target; labels are ordered by reverse inclusion, so visiting the target more
often is "lower" (less generic) behaviour.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import StratError
from ..io import fmt
from ..poset import Poset
from ..trace import Trace


@dataclass(frozen=True)
class TargetSet:
    """Membership predicate over state vectors (rows of a trace)."""

    contains: Callable[[np.ndarray], np.ndarray]
    name: str = "T"

    def __call__(self, states: np.ndarray) -> np.ndarray:
        return np.asarray(self.contains(np.atleast_2d(np.asarray(states, dtype=float))), dtype=bool)

    @classmethod
    def everything(cls) -> "TargetSet":
        return cls(lambda s: np.ones(len(s), dtype=bool), "X")

    @classmethod
    def empty(cls) -> "TargetSet":
        return cls(lambda s: np.zeros(len(s), dtype=bool), "empty")

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "TargetSet":
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        return cls(lambda s: np.all((s >= lo) & (s <= hi), axis=1), f"box{lo.tolist()}-{hi.tolist()}")

    @classmethod
    def ball(cls, center: Sequence[float], radius: float) -> "TargetSet":
        center = np.asarray(center, dtype=float)
        return cls(lambda s: np.linalg.norm(s - center, axis=1) <= radius, f"ball{center.tolist()}")

    @classmethod
    def states(cls, points: Iterable[Sequence[float]], tol: float = 1e-9) -> "TargetSet":
        pts = np.atleast_2d(np.asarray(list(points), dtype=float))

        def contains(s):
            if pts.size == 0:
                return np.zeros(len(s), dtype=bool)
            d = np.abs(s[:, None, :] - pts[None, :, :]).max(axis=2)
            return (d <= tol).any(axis=1)

        return cls(contains, "states")


def time_label(trace: Trace, target: TargetSet) -> frozenset[float]:
    hit = target(trace.states)
    return frozenset(float(t) for t in trace.times[hit])


def label_id(label: frozenset[float]) -> str:
    return "{" + ",".join(fmt(t) for t in sorted(label)) + "}"


def traj_stratify(traces: Sequence[Trace], target: TargetSet) -> tuple[list[frozenset[float]], Poset]:
    """Time-set label of every trace, and the realized labels under reverse inclusion."""
    if not traces:
        raise StratError("no-traces", "traj_stratify needs at least one trace")
    labels = [time_label(tr, target) for tr in traces]
    distinct = sorted(set(labels), key=lambda z: (-len(z), sorted(z)))
    # Z <= Z' iff Z contains Z'
    rel = [(label_id(a), label_id(b)) for a, b in itertools.permutations(distinct, 2) if a > b]
    return labels, Poset.from_relations([label_id(z) for z in distinct], rel)

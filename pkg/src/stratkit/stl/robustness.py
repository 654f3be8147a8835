"""Quantitative (robustness) and boolean semantics of STL over sampled traces.

A window ``t + [a, b]`` covers the sample indices whose times fall inside it,
cut off at the end of the trace.  An empty window gives ``-BIG`` for
eventually/until and ``+BIG`` for always; ``true`` has robustness ``+BIG`` and
atom values are clipped to ``[-BIG, BIG]``, which keeps the identities
``F = true U`` and ``G = !F!`` exact.
"""

from __future__ import annotations

import re
from typing import Callable, Mapping

import numpy as np

from ..errors import StratError
from ..trace import Trace
from .ast import GEQ, Always, And, Atom, Eventually, Formula, Not, Or, TrueF, Until

BIG = 1e9

_PROJ = re.compile(r"^x\[(\d+)\]$")


class FunctionRegistry:
    """Named scalar functions of the state vector.

    Functions take the ``(n, D)`` state matrix and return ``n`` values.  Names
    not registered fall back to trace channel names and to ``x[i]`` (0-based
    column ``i``).
    """

    def __init__(self, functions: Mapping[str, Callable[[np.ndarray], np.ndarray]] | None = None):
        self.functions: dict[str, Callable] = dict(functions or {})

    def register(self, name: str, fn: Callable[[np.ndarray], np.ndarray]) -> str:
        self.functions[name] = fn
        return name

    def affine(self, name: str, weights, offset: float = 0.0) -> str:
        w = np.asarray(weights, dtype=float)
        return self.register(name, lambda s: s @ w + offset)

    def __contains__(self, name: str) -> bool:
        return name in self.functions

    def evaluate(self, name: str, trace: Trace) -> np.ndarray:
        if name in self.functions:
            vals = np.asarray(self.functions[name](trace.states), dtype=float).reshape(-1)
            if len(vals) != len(trace):
                raise StratError("unresolved-function", f"{name} returned {len(vals)} values")
            return vals
        if name in trace.channels:
            return trace.states[:, trace.channels.index(name)]
        m = _PROJ.match(name)
        if m and int(m.group(1)) < trace.dim:
            return trace.states[:, int(m.group(1))]
        raise StratError("unresolved-function", repr(name))


def _windows(times: np.ndarray, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive index range ``[lo, hi]`` of each sample's window (empty if lo > hi)."""
    step = float(np.median(np.diff(times))) if len(times) > 1 else 1.0
    eps = 1e-9 * max(1.0, abs(step))
    lo = np.searchsorted(times, times + a - eps, side="left")
    hi = np.searchsorted(times, times + b + eps, side="right") - 1
    return lo, hi


def robustness_signal(phi: Formula, trace: Trace, reg: FunctionRegistry | None = None) -> np.ndarray:
    """Robustness of ``phi`` at every sample index."""
    reg = reg or FunctionRegistry()
    cache: dict[int, np.ndarray] = {}

    def rec(f: Formula) -> np.ndarray:
        key = id(f)
        if key in cache:
            return cache[key]
        n = len(trace)
        if isinstance(f, TrueF):
            out = np.full(n, BIG)
        elif isinstance(f, Atom):
            v = reg.evaluate(f.fn, trace)
            out = np.clip(v - f.mu if f.op == GEQ else f.mu - v, -BIG, BIG)
        elif isinstance(f, Not):
            out = -rec(f.child)
        elif isinstance(f, And):
            out = np.minimum(rec(f.left), rec(f.right))
        elif isinstance(f, Or):
            out = np.maximum(rec(f.left), rec(f.right))
        elif isinstance(f, (Eventually, Always)):
            x = rec(f.child)
            lo, hi = _windows(trace.times, f.a, f.b)
            ev = isinstance(f, Eventually)
            out = np.empty(n)
            for i in range(n):
                if lo[i] > hi[i]:
                    out[i] = -BIG if ev else BIG
                else:
                    seg = x[lo[i]:hi[i] + 1]
                    out[i] = seg.max() if ev else seg.min()
        elif isinstance(f, Until):
            x1, x2 = rec(f.left), rec(f.right)
            lo, hi = _windows(trace.times, f.a, f.b)
            out = np.full(n, -BIG)
            for i in range(n):
                if lo[i] > hi[i]:
                    continue
                running = np.minimum.accumulate(x1[i:hi[i] + 1])
                cand = np.minimum(x2[lo[i]:hi[i] + 1], running[lo[i] - i:])
                out[i] = cand.max()
        else:
            raise TypeError(f"not a formula: {f!r}")
        cache[key] = out
        return out

    return rec(phi)


def robustness(phi: Formula, trace: Trace, t_index: int = 0, reg: FunctionRegistry | None = None) -> float:
    if not (0 <= t_index < len(trace)):
        raise StratError("index-out-of-range", f"{t_index} not in [0, {len(trace)})")
    return float(robustness_signal(phi, trace, reg)[t_index])


def robustness_bool_oracle(phi: Formula, trace: Trace, t_index: int = 0, reg: FunctionRegistry | None = None) -> bool:
    """Boolean satisfaction, computed without min/max; used to cross-check signs."""
    if not (0 <= t_index < len(trace)):
        raise StratError("index-out-of-range", f"{t_index} not in [0, {len(trace)})")
    reg = reg or FunctionRegistry()
    times = trace.times.tolist()
    step = (times[-1] - times[0]) / (len(times) - 1) if len(times) > 1 else 1.0
    eps = 1e-9 * max(1.0, abs(step))
    values: dict[str, list[float]] = {}

    def value(name: str, i: int) -> float:
        if name not in values:
            values[name] = reg.evaluate(name, trace).tolist()
        return values[name][i]

    def window(i: int, a: float, b: float) -> list[int]:
        return [j for j in range(len(times)) if times[i] + a - eps <= times[j] <= times[i] + b + eps]

    def sat(f: Formula, i: int) -> bool:
        if isinstance(f, TrueF):
            return True
        if isinstance(f, Atom):
            v = value(f.fn, i)
            return v >= f.mu if f.op == GEQ else v <= f.mu
        if isinstance(f, Not):
            return not sat(f.child, i)
        if isinstance(f, And):
            return sat(f.left, i) and sat(f.right, i)
        if isinstance(f, Or):
            return sat(f.left, i) or sat(f.right, i)
        if isinstance(f, Eventually):
            return any(sat(f.child, j) for j in window(i, f.a, f.b))
        if isinstance(f, Always):
            return all(sat(f.child, j) for j in window(i, f.a, f.b))
        if isinstance(f, Until):
            return any(
                sat(f.right, j) and all(sat(f.left, k) for k in range(i, j + 1))
                for j in window(i, f.a, f.b)
            )
        raise TypeError(f"not a formula: {f!r}")

    return sat(phi, t_index)


def normalize(rho: float, scale: float) -> float:
    """Map robustness into [-1, 1]."""
    if not scale > 0:
        raise StratError("nonpositive-scale", str(scale))
    return float(min(1.0, max(-1.0, rho / scale)))

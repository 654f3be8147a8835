"""Random STL formulas and traces for property tests."""

import numpy as np

from stratkit.stl import Always, And, Atom, Eventually, Not, Or, TrueF, Until
from stratkit.trace import Trace

CHANNELS = ("x1", "x2")


def random_interval(rng, max_b=12):
    a = int(rng.integers(0, max_b))
    return a, a + int(rng.integers(0, max_b - a + 1))


def random_atom(rng):
    return Atom(CHANNELS[int(rng.integers(2))], ">=" if rng.random() < 0.5 else "<=", round(float(rng.normal()), 3))


def random_formula(rng, depth=4, positive=False):
    """A formula of depth at most ``depth``; ``positive`` omits negation."""
    if depth <= 1 or rng.random() < 0.2:
        return TrueF() if rng.random() < 0.05 else random_atom(rng)
    kinds = ["and", "or", "F", "G", "U"] + ([] if positive else ["not"])
    k = kinds[int(rng.integers(len(kinds)))]
    sub = lambda: random_formula(rng, depth - 1, positive)  # noqa: E731
    if k == "not":
        return Not(sub())
    if k == "and":
        return And(sub(), sub())
    if k == "or":
        return Or(sub(), sub())
    a, b = random_interval(rng)
    if k == "F":
        return Eventually(a, b, sub())
    if k == "G":
        return Always(a, b, sub())
    return Until(a, b, sub(), sub())


def random_trace(rng, n=50):
    # random walks with occasional plateaus, so atoms hit their thresholds
    steps = rng.normal(scale=0.4, size=(n, 2))
    steps[rng.random(n) < 0.2] = 0.0
    return Trace.uniform(np.cumsum(steps, axis=0) * 0.5, channels=CHANNELS)

"""STL abstract syntax.

``str(formula)`` is the canonical printer: fully parenthesized, and parsing
it gives back an equal tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import StratError
from ..io import fmt

GEQ = ">="
LEQ = "<="


class Formula:
    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children()), default=0)

    def atoms(self):
        if isinstance(self, Atom):
            yield self
        for c in self.children():
            yield from c.atoms()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


def _check_interval(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b)) or a < 0 or a > b:
        raise StratError("bad-interval", f"[{fmt(a)},{fmt(b)}] needs 0 <= a <= b < inf")


@dataclass(frozen=True)
class TrueF(Formula):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class Atom(Formula):
    fn: str
    op: str
    mu: float

    def __post_init__(self):
        if self.op not in (GEQ, LEQ):
            raise StratError("syntax-error", f"comparator {self.op!r}")
        object.__setattr__(self, "mu", float(self.mu))
        if not math.isfinite(self.mu):
            raise StratError("syntax-error", "threshold must be finite")

    def __str__(self) -> str:
        return f"{self.fn} {self.op} {fmt(self.mu)}"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def children(self):
        return (self.child,)

    def __str__(self) -> str:
        return f"!({self.child})"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left}) & ({self.right})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left}) | ({self.right})"


@dataclass(frozen=True)
class Eventually(Formula):
    a: float
    b: float
    child: Formula

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        _check_interval(self.a, self.b)

    def children(self):
        return (self.child,)

    def __str__(self) -> str:
        return f"F[{fmt(self.a)},{fmt(self.b)}] ({self.child})"


@dataclass(frozen=True)
class Always(Formula):
    a: float
    b: float
    child: Formula

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        _check_interval(self.a, self.b)

    def children(self):
        return (self.child,)

    def __str__(self) -> str:
        return f"G[{fmt(self.a)},{fmt(self.b)}] ({self.child})"


@dataclass(frozen=True)
class Until(Formula):
    a: float
    b: float
    left: Formula
    right: Formula

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        _check_interval(self.a, self.b)

    def children(self):
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left}) U[{fmt(self.a)},{fmt(self.b)}] ({self.right})"


def conj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out

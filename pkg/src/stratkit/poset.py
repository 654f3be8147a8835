"""Finite posets stored as Hasse diagrams.

Closed sets of the Alexandrov topology are the down-sets, so a map between
posets is continuous exactly when it is monotone.  Reachability is answered
from transitive-closure bitsets (python ints), built once per poset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import StratError


class Poset:
    """Finite poset given by its elements and Hasse covers ``(lower, upper)``."""

    def __init__(self, elements: Iterable[str], covers: Iterable[tuple[str, str]] = (), check: bool = True):
        self.elements = tuple(str(e) for e in elements)
        self.covers = tuple((str(a), str(b)) for a, b in covers)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise StratError("duplicate-element", "element ids must be unique")
        for a, b in self.covers:
            for x in (a, b):
                if x not in self.index:
                    raise StratError("unknown-element", repr(x))
        if check:
            validate_poset(self)

    @classmethod
    def from_relations(cls, elements: Iterable[str], relations: Iterable[tuple[str, str]]) -> "Poset":
        """Build from any generating set of relations ``a <= b`` (takes the transitive reduction)."""
        elements = list(elements)
        rel = {(a, b) for a, b in relations if a != b}
        raw = cls(elements, sorted(rel), check=False)
        down = raw._down  # raises on cycles
        covers = []
        for a, b in sorted(rel):
            ia, ib = raw.index[a], raw.index[b]
            # a < c < b for some c means (a, b) is not a cover
            between = (down[ib] & raw._up[ia]) & ~((1 << ia) | (1 << ib))
            if not between:
                covers.append((a, b))
        return cls(elements, covers)

    # -- closure ---------------------------------------------------------

    @cached_property
    def _order(self) -> list[int]:
        n = len(self.elements)
        indeg = [0] * n
        succ: list[list[int]] = [[] for _ in range(n)]
        for a, b in self.covers:
            succ[self.index[a]].append(self.index[b])
            indeg[self.index[b]] += 1
        stack = [i for i in range(n) if indeg[i] == 0][::-1]
        order = []
        while stack:
            i = stack.pop()
            order.append(i)
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    stack.append(j)
        if len(order) != n:
            cycle = self._find_cycle(succ)
            raise StratError("cycle-detected", " < ".join(cycle), witness=cycle)
        return order

    def _find_cycle(self, succ: list[list[int]]) -> list[str]:
        color = [0] * len(self.elements)
        parent: dict[int, int] = {}
        for root in range(len(self.elements)):
            if color[root]:
                continue
            stack = [(root, iter(succ[root]))]
            color[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[node] = 2
                    stack.pop()
                elif color[nxt] == 1:
                    cyc = [nxt]
                    cur = node
                    while cur != nxt:
                        cyc.append(cur)
                        cur = parent[cur]
                    cyc.append(nxt)
                    return [self.elements[i] for i in reversed(cyc)]
                elif color[nxt] == 0:
                    color[nxt] = 1
                    parent[nxt] = node
                    stack.append((nxt, iter(succ[nxt])))
        return []

    @cached_property
    def _down(self) -> list[int]:
        down = [1 << i for i in range(len(self.elements))]
        preds: list[list[int]] = [[] for _ in self.elements]
        for a, b in self.covers:
            preds[self.index[b]].append(self.index[a])
        for i in self._order:
            for j in preds[i]:
                down[i] |= down[j]
        return down

    @cached_property
    def _up(self) -> list[int]:
        up = [0] * len(self.elements)
        for i, mask in enumerate(self._down):
            for j in _bits(mask):
                up[j] |= 1 << i
        return up

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and set(self.covers) == set(other.covers)

    def __hash__(self):
        return hash((frozenset(self.elements), frozenset(self.covers)))

    def __repr__(self) -> str:
        return f"Poset({len(self.elements)} elements, {len(self.covers)} covers)"

    def _idx(self, x: str) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise StratError("unknown-element", repr(x)) from None

    def leq(self, a: str, b: str) -> bool:
        return bool(self._down[self._idx(b)] >> self._idx(a) & 1)

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: str, b: str) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def _mask(self, S: Iterable[str]) -> int:
        m = 0
        for x in S:
            m |= 1 << self._idx(x)
        return m

    def _names(self, mask: int) -> frozenset[str]:
        return frozenset(self.elements[i] for i in _bits(mask))

    def down_set(self, S: Iterable[str]) -> frozenset[str]:
        m = 0
        for x in S:
            m |= self._down[self._idx(x)]
        return self._names(m)

    def up_set(self, S: Iterable[str]) -> frozenset[str]:
        m = 0
        for x in S:
            m |= self._up[self._idx(x)]
        return self._names(m)

    def is_down_set(self, S: Iterable[str]) -> bool:
        S = set(S)
        return self.down_set(S) == S

    def relations(self) -> list[tuple[str, str]]:
        """All strict relations ``a < b``."""
        out = []
        for i, b in enumerate(self.elements):
            for j in _bits(self._down[i] & ~(1 << i)):
                out.append((self.elements[j], b))
        return out

    def lower_covers(self, x: str) -> list[str]:
        return [a for a, b in self.covers if b == x]

    def upper_covers(self, x: str) -> list[str]:
        return [b for a, b in self.covers if a == x]

    def minimal(self) -> list[str]:
        has_lower = {b for _, b in self.covers}
        return [e for e in self.elements if e not in has_lower]

    def maximal(self) -> list[str]:
        has_upper = {a for a, _ in self.covers}
        return [e for e in self.elements if e not in has_upper]

    def down_sets(self) -> list[frozenset[str]]:
        """Every down-set (closed set).  Exponential; meant for small posets."""
        out = []
        n = len(self.elements)
        for mask in range(1 << n):
            if all((self._down[i] & ~mask) == 0 for i in _bits(mask)):
                out.append(self._names(mask))
        return out

    def opposite(self) -> "Poset":
        return Poset(self.elements, [(b, a) for a, b in self.covers], check=False)

    # -- exchange formats ------------------------------------------------

    def to_dict(self) -> dict:
        return {"elements": list(self.elements), "covers": [list(c) for c in self.covers]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping, check: bool = True) -> "Poset":
        return cls(data["elements"], [tuple(c) for c in data.get("covers", [])], check=check)

    @classmethod
    def from_json(cls, text: str, check: bool = True) -> "Poset":
        return cls.from_dict(json.loads(text), check=check)

    def to_dot(self, name: str = "P") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for e in self.elements:
            lines.append(f"  {json.dumps(e)};")
        for a, b in self.covers:
            lines.append(f"  {json.dumps(a)} -> {json.dumps(b)};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def validate_poset(p: Poset) -> None:
    """Raise ``cycle-detected`` or ``redundant-cover`` if the covers are not a Hasse diagram."""
    down = p._down
    up = p._up
    seen = set()
    for a, b in p.covers:
        if (a, b) in seen:
            raise StratError("redundant-cover", f"({a}, {b}) listed twice", witness=(a, b))
        seen.add((a, b))
        ia, ib = p.index[a], p.index[b]
        between = down[ib] & up[ia] & ~((1 << ia) | (1 << ib))
        if between:
            mid = p.elements[next(_bits(between))]
            raise StratError("redundant-cover", f"({a}, {b}) implied via {mid}", witness=(a, b))


def down_set(p: Poset, S: Iterable[str]) -> frozenset[str]:
    return p.down_set(S)


@dataclass(frozen=True)
class MonotoneMap:
    source: Poset
    target: Poset
    assignment: Mapping[str, str]


def is_monotone(m: MonotoneMap) -> tuple[bool, tuple[str, str] | None]:
    """Check monotonicity on every Hasse edge of the source.

    Returns ``(True, None)`` or ``(False, (x, y))`` with ``x < y`` a cover whose
    images are not ordered.
    """
    missing = [x for x in m.source.elements if x not in m.assignment]
    if missing:
        raise StratError("partial-assignment", f"no image for {missing[0]!r}")
    for x in m.source.elements:
        if m.assignment[x] not in m.target:
            raise StratError("unknown-element", f"image {m.assignment[x]!r} of {x!r} not in target")
    for x, y in m.source.covers:
        if not m.target.leq(m.assignment[x], m.assignment[y]):
            return False, (x, y)
    return True, None


# -- cell complexes of grids -------------------------------------------------


@dataclass(frozen=True)
class GridComplex:
    """Square cell complex of a ``rows x cols`` grid.

    Faces are ``f(r,c)`` with 1-based row/column (row 1 on top).  Vertices
    ``v(i,j)`` sit on lattice points ``0 <= i <= rows, 0 <= j <= cols``;
    horizontal edges ``h(i,c)`` join ``v(i,c-1)`` and ``v(i,c)``; vertical
    edges ``e(r,j)`` join ``v(r-1,j)`` and ``v(r,j)``.
    """

    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise StratError("bad-grid", f"{self.rows}x{self.cols}")

    @staticmethod
    def face_id(r: int, c: int) -> str:
        return f"f({r},{c})"

    def faces(self) -> list[str]:
        return [self.face_id(r, c) for r in range(1, self.rows + 1) for c in range(1, self.cols + 1)]

    def vertices(self) -> list[str]:
        return [f"v({i},{j})" for i in range(self.rows + 1) for j in range(self.cols + 1)]

    def edges(self) -> list[str]:
        h = [f"h({i},{c})" for i in range(self.rows + 1) for c in range(1, self.cols + 1)]
        v = [f"e({r},{j})" for r in range(1, self.rows + 1) for j in range(self.cols + 1)]
        return h + v

    def counts(self) -> tuple[int, int, int]:
        """(faces, edges, vertices) by closed form."""
        r, c = self.rows, self.cols
        return r * c, r * (c + 1) + c * (r + 1), (r + 1) * (c + 1)


def face_poset(g: GridComplex) -> Poset:
    covers = []
    for i in range(g.rows + 1):
        for c in range(1, g.cols + 1):
            covers += [(f"v({i},{c - 1})", f"h({i},{c})"), (f"v({i},{c})", f"h({i},{c})")]
    for r in range(1, g.rows + 1):
        for j in range(g.cols + 1):
            covers += [(f"v({r - 1},{j})", f"e({r},{j})"), (f"v({r},{j})", f"e({r},{j})")]
    for r in range(1, g.rows + 1):
        for c in range(1, g.cols + 1):
            f = g.face_id(r, c)
            for edge in (f"h({r - 1},{c})", f"h({r},{c})", f"e({r},{c - 1})", f"e({r},{c})"):
                covers.append((edge, f))
    return Poset(g.vertices() + g.edges() + g.faces(), covers, check=False)


# -- order complexes ---------------------------------------------------------


def chain_id(chain: tuple[str, ...]) -> str:
    return json.dumps(list(chain))


@dataclass(frozen=True)
class OrderComplex:
    """Chains of ``base`` with at most ``max_len`` elements, ordered by reverse inclusion."""

    base: Poset
    chains: tuple[tuple[str, ...], ...]

    @cached_property
    def poset(self) -> Poset:
        present = set(self.chains)
        covers = []
        for ch in self.chains:
            for k in range(len(ch)):
                sub = ch[:k] + ch[k + 1:]
                if sub in present:
                    covers.append((chain_id(ch), chain_id(sub)))
        return Poset([chain_id(c) for c in self.chains], covers, check=False)

    def __len__(self) -> int:
        return len(self.chains)


def order_complex(p: Poset, max_len: int) -> OrderComplex:
    """All chains of ``p`` with at most ``max_len`` elements, the empty chain included.

    Chains are listed as increasing tuples; the empty chain is the top element.
    """
    if max_len < 0:
        raise StratError("bad-length", str(max_len))
    topo = [p.elements[i] for i in p._order]
    chains: list[tuple[str, ...]] = [()]
    frontier: list[tuple[str, ...]] = [()]
    for _ in range(max_len):
        nxt = []
        for ch in frontier:
            for x in topo:
                if not ch or p.lt(ch[-1], x):
                    nxt.append(ch + (x,))
        chains += nxt
        frontier = nxt
        if not nxt:
            break
    return OrderComplex(p, tuple(chains))


# -- trees -------------------------------------------------------------------


def check_tree(t: Poset) -> str:
    """Return the root of a tree poset (unique minimum, one lower cover per non-root)."""
    mins = t.minimal()
    if len(mins) != 1:
        raise StratError("not-a-tree", f"{len(mins)} minimal elements")
    for x in t.elements:
        if x != mins[0] and len(t.lower_covers(x)) != 1:
            raise StratError("not-a-tree", f"{x!r} has {len(t.lower_covers(x))} lower covers")
    return mins[0]


def tree_meet(t: Poset, S: Iterable[str]) -> str:
    """Greatest lower bound in a rooted tree: the deepest common ancestor."""
    S = list(S)
    if not S:
        raise StratError("empty-set", "tree_meet needs a nonempty set")
    check_tree(t)
    common = ~0
    for x in S:
        common &= t._down[t._idx(x)]
    # the common ancestors form a chain; the deepest has the largest down-set
    best = max(_bits(common), key=lambda i: bin(t._down[i]).count("1"))
    return t.elements[best]


__all__ = [
    "Poset", "validate_poset", "down_set", "MonotoneMap", "is_monotone",
    "GridComplex", "face_poset", "OrderComplex", "order_complex", "chain_id",
    "check_tree", "tree_meet",
]

"""Recursive-descent parser for STL text.

Grammar (lowest to highest precedence)::

    or     := and ('|' and)*
    and    := until ('&' until)*
    until  := unary ('U[a,b]' unary)*
    unary  := '!' unary | 'F[a,b]' unary | 'G[a,b]' unary | primary
    primary:= 'true' | ident ('>=' | '<=') number | '(' or ')'

Binary operators associate to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import StratError
from .ast import Always, And, Atom, Eventually, Formula, Not, Or, TrueF, Until

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<temporal>[FGU])\s*\[\s*(?P<a>{_NUM})\s*,\s*(?P<b>{_NUM})\s*\]
  | (?P<badtemporal>[FGU]\s*\[)
  | (?P<num>{_NUM})
  | (?P<cmp>>=|<=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\[\d+\])?)
  | (?P<op>[!&|()])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int
    a: float = 0.0
    b: float = 0.0


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise StratError("syntax-error", f"at position {pos}: unexpected {text[pos]!r}", witness=pos)
        kind = m.lastgroup if m.lastgroup not in ("a", "b") else "temporal"
        if kind == "badtemporal":
            raise StratError("syntax-error", f"at position {pos}: malformed interval, expected {text[pos]}[a,b]", witness=pos)
        if m.group("temporal"):
            kind = "temporal"
            out.append(Token(kind, m.group("temporal"), pos, float(m.group("a")), float(m.group("b"))))
        elif kind == "ident" and m.group() == "true":
            out.append(Token("true", "true", pos))
        elif kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, what: str):
        t = self.tok
        found = repr(t.text) if t.kind != "eof" else "end of input"
        raise StratError("syntax-error", f"at position {t.pos}: expected {what}, found {found}", witness=t.pos)

    def take(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def parse(self) -> Formula:
        f = self.or_()
        if self.tok.kind != "eof":
            self.fail("end of input")
        return f

    def or_(self) -> Formula:
        f = self.and_()
        while self.tok.kind == "op" and self.tok.text == "|":
            self.take()
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.until()
        while self.tok.kind == "op" and self.tok.text == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        f = self.unary()
        while self.tok.kind == "temporal" and self.tok.text == "U":
            t = self.take()
            rhs = self.unary()
            f = self._interval(t, lambda a, b: Until(a, b, f, rhs))
        return f

    def _interval(self, t: Token, build):
        try:
            return build(t.a, t.b)
        except StratError as exc:
            raise StratError(exc.code, f"at position {t.pos}: {exc.detail}", witness=t.pos) from None

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "op" and t.text == "!":
            self.take()
            return Not(self.unary())
        if t.kind == "temporal" and t.text in "FG":
            self.take()
            child = self.unary()
            cls = Eventually if t.text == "F" else Always
            return self._interval(t, lambda a, b: cls(a, b, child))
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if t.kind == "true":
            self.take()
            return TrueF()
        if t.kind == "op" and t.text == "(":
            self.take()
            f = self.or_()
            if not (self.tok.kind == "op" and self.tok.text == ")"):
                self.fail("')'")
            self.take()
            return f
        if t.kind == "ident":
            name = self.take().text
            if self.tok.kind != "cmp":
                self.fail("'>=' or '<='")
            op = self.take().text
            if self.tok.kind != "num":
                self.fail("a number")
            return Atom(name, op, float(self.take().text))
        self.fail("a formula")


def parse(text: str) -> Formula:
    return _Parser(text).parse()

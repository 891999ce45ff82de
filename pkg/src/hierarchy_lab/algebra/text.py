"""Canonical text rendering and parsing of Q(sqrt2) scalars and polynomials.

Rendered form: terms in ascending graded-lex order joined by `` + `` /
`` - ``, each term ``coef*x1^2*x2``; rationals print as ``p/q``, surds as
``a+b*sqrt2``.  The parser accepts any expression built from integers,
``p/q`` fractions, ``sqrt2``, variable names, ``+ - * / ^ **`` and
parentheses, so the rendering of every polynomial parses back to itself.
Decimal literals are rejected: coefficients must be exact.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Sequence

from ..errors import ParseError
from .multiindex import MultiIndex
from .polynomial import Polynomial
from .qsqrt2 import QSqrt2

__all__ = [
    "render_scalar",
    "render_polynomial",
    "parse_polynomial",
    "parse_scalar",
    "default_names",
]


def default_names(n: int) -> List[str]:
    return [f"x{i + 1}" for i in range(n)]


def _rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def render_scalar(c) -> str:
    if isinstance(c, QSqrt2):
        a, b = c.rat_part, c.surd_part
        if b == 0:
            return _rat(a)
        if b == 1:
            surd = "sqrt2"
        elif b == -1:
            surd = "-sqrt2"
        else:
            surd = f"{_rat(b)}*sqrt2"
        if a == 0:
            return surd
        return f"{_rat(a)}{'' if surd.startswith('-') else '+'}{surd}"
    if isinstance(c, Fraction):
        return _rat(c)
    if isinstance(c, float):
        return repr(c)
    return str(c)


def _render_monomial(alpha: MultiIndex, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, alpha):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def render_polynomial(p: Polynomial, names: Optional[Sequence[str]] = None) -> str:
    names = list(names) if names is not None else default_names(p.num_vars)
    if p.is_zero():
        return "0"
    pieces = []
    for alpha, c in p.sorted_terms():
        mono = _render_monomial(alpha, names)
        coef = render_scalar(c)
        compound = ("+" in coef[1:] or "-" in coef[1:]) or (
            isinstance(c, float) and "e" in coef
        )
        if not mono:
            term = f"({coef})" if compound else coef
        elif coef == "1":
            term = mono
        elif coef == "-1":
            term = "-" + mono
        elif compound:
            term = f"({coef})*{mono}"
        else:
            term = f"{coef}*{mono}"
        pieces.append(term)
    out = pieces[0]
    for term in pieces[1:]:
        out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = {name: i for i, name in enumerate(names)}
        self.n = len(names)
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _tokenize(self, text):
        tokens, i = [], 0
        stripped = text.rstrip()
        while i < len(stripped):
            m = _TOKEN.match(stripped, i)
            if not m or m.end() == i:
                raise ParseError(f"unexpected character at {i} in {text!r}")
            kind = m.lastgroup
            value = m.group(kind)
            if kind == "num" and not value.isdigit():
                raise ParseError(f"inexact literal {value!r}: write coefficients as p/q")
            tokens.append((kind, "^" if value == "**" else value))
            i = m.end()
        return tokens

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value):
        kind, v = self.take()
        if v != value:
            raise ParseError(f"expected {value!r} in {self.text!r}")

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise ParseError("empty expression")
        p = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if q.is_zero() or (q.degree or 0) > 0:
                    raise ParseError("division only by nonzero constants")
                p = p.scale(QSqrt2(1) / q.coefficient(MultiIndex.zero(self.n)))
        return p

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, v = self.take()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer")
            base = base ** int(v)
        return base

    def atom(self):
        kind, v = self.take()
        if kind == "num":
            return Polynomial.constant(QSqrt2(int(v)), self.n)
        if kind == "name":
            if v == "sqrt2":
                return Polynomial.constant(QSqrt2(0, 1), self.n)
            if v in self.names:
                return Polynomial.variable(self.names[v], self.n, one=QSqrt2(1))
            raise ParseError(f"unknown variable {v!r}")
        if v == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected token {v!r} in {self.text!r}")


def parse_polynomial(text: str, names: Sequence[str]) -> Polynomial:
    """Parse ``text`` into a polynomial with ``QSqrt2`` coefficients."""
    if not isinstance(text, str):
        raise ParseError(f"expected polynomial text, got {type(text).__name__}")
    return _Parser(text, names).parse()


def parse_scalar(text) -> QSqrt2:
    """Parse an exact scalar such as ``"6-4*sqrt2"`` or ``"-1/2"``; ints pass through."""
    if isinstance(text, bool):
        raise ParseError("booleans are not coefficients")
    if isinstance(text, int):
        return QSqrt2(text)
    if isinstance(text, float):
        raise ParseError(f"inexact coefficient {text!r}: write it as a string p/q")
    p = parse_polynomial(text, [])
    return p.coefficient(MultiIndex.zero(0), QSqrt2(0))

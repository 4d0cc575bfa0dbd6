"""Text syntax for homogeneous polynomials.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'

Division is only allowed by integer constants; the resulting rational
coefficients are cleared by the caller (see :func:`clear_denominators`).
"""

from __future__ import annotations

import math
import re
from collections import Counter
from fractions import Fraction
from typing import Sequence

from .poly import HomPoly, PolyError, format_monomial, pack

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class PolyParseError(PolyError):
    def __init__(self, message: str, text: str, column: int):
        self.text = text
        self.column = column
        super().__init__(f"{message} at column {column}: {text!r}")


_Poly = dict  # exponent tuple -> Fraction


def _mul(a: _Poly, b: _Poly) -> _Poly:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _add(a: _Poly, b: _Poly, sign: int = 1) -> _Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + sign * c
    return {e: c for e, c in out.items() if c}


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.vars = {name: i for i, name in enumerate(variables)}
        self.n = len(variables)
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                col = pos + len(stripped[pos:]) - len(stripped[pos:].lstrip()) + 1
                raise PolyParseError("unexpected character", text, col)
            col = m.start(m.lastindex) + 1
            if m.group(1):
                self.tokens.append(("int", m.group(1), col))
            elif m.group(2):
                self.tokens.append(("name", m.group(2), col))
            else:
                op = "^" if m.group(3) == "**" else m.group(3)
                self.tokens.append(("op", op, col))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text) + 1)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def const(self, c) -> _Poly:
        return {(0,) * self.n: Fraction(c)} if c else {}

    def parse(self) -> _Poly:
        if not self.tokens:
            raise PolyParseError("empty expression", self.text, 1)
        out = self.expr()
        kind, val, col = self.peek()
        if kind != "end":
            raise PolyParseError(f"unexpected {val!r}", self.text, col)
        return out

    def expr(self) -> _Poly:
        acc = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            _, op, _ = self.take()
            acc = _add(acc, self.term(), 1 if op == "+" else -1)
        return acc

    def term(self) -> _Poly:
        acc = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            _, op, col = self.take()
            rhs = self.factor()
            if op == "*":
                acc = _mul(acc, rhs)
            else:
                if len(rhs) != 1 or next(iter(rhs)) != (0,) * self.n:
                    raise PolyParseError("division only by nonzero constants", self.text, col)
                d = next(iter(rhs.values()))
                acc = {e: c / d for e, c in acc.items()}
        return acc

    def factor(self) -> _Poly:
        kind, val, col = self.peek()
        if (kind, val) in (("op", "-"), ("op", "+")):
            self.take()
            inner = self.factor()
            return {e: -c for e, c in inner.items()} if val == "-" else inner
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, col = self.take()
            if kind != "int":
                raise PolyParseError("exponent must be a non-negative integer", self.text, col)
            result = self.const(1)
            for _ in range(int(val)):
                result = _mul(result, base)
            return result
        return base

    def atom(self) -> _Poly:
        kind, val, col = self.take()
        if kind == "int":
            return self.const(int(val))
        if kind == "name":
            if val not in self.vars:
                raise PolyParseError(f"unknown variable {val!r}", self.text, col)
            e = [0] * self.n
            e[self.vars[val]] = 1
            return {tuple(e): Fraction(1)}
        if (kind, val) == ("op", "("):
            inner = self.expr()
            kind, val, col2 = self.take()
            if (kind, val) != ("op", ")"):
                raise PolyParseError("expected ')'", self.text, col2)
            return inner
        if kind == "end":
            raise PolyParseError("unexpected end of expression", self.text, col)
        raise PolyParseError(f"unexpected {val!r}", self.text, col)


def parse_rational(text: str, variables: Sequence[str]) -> dict[tuple[int, ...], Fraction]:
    """Parse to ``{exponents: Fraction}`` without a homogeneity check."""
    return _Parser(text, variables).parse()


def check_homogeneous(terms: dict[tuple[int, ...], Fraction], variables: Sequence[str],
                      text: str = "") -> int:
    """Return the common degree, or raise naming the offending monomials."""
    if not terms:
        raise PolyError(f"polynomial {text!r} is identically zero")
    degrees = Counter(sum(e) for e in terms)
    ranked = sorted(degrees.items(), key=lambda kv: (-kv[1], -kv[0]))
    target = ranked[0][0]
    bad = [format_monomial(e, variables) for e in terms if sum(e) != target]
    if bad:
        raise PolyError(
            f"polynomial {text!r} is not homogeneous: expected degree {target}, "
            f"offending monomials {', '.join(sorted(bad))}")
    return target


def clear_denominators(polys: list[dict[tuple[int, ...], Fraction]]) -> list[dict[tuple[int, ...], int]]:
    """Scale all polynomials by one common factor so every coefficient is integral."""
    den = 1
    for p in polys:
        for c in p.values():
            den = math.lcm(den, Fraction(c).denominator)
    return [{e: int(c * den) for e, c in p.items()} for p in polys]


def parse_poly(text: str, variables: Sequence[str]) -> HomPoly:
    """Parse a homogeneous polynomial; rational coefficients are cleared."""
    terms = parse_rational(text, variables)
    degree = check_homogeneous(terms, variables, text)
    ints, = clear_denominators([terms])
    n = len(variables)
    return HomPoly(n, degree, {pack(e): c for e, c in ints.items()})

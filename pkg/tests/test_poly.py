"""Packed polynomial arithmetic, parsing and gcd, checked against sympy."""

import sympy
import pytest
from hypothesis import given, settings, strategies as st

from ratdyn.parse import PolyParseError, parse_poly
from ratdyn.poly import HomPoly, PolyError, certify_coprime, gcd, gcd_many, pack, unpack

X, Y, Z = sympy.symbols("x y z")
NAMES = "xyz"


def to_sympy(p: HomPoly):
    return sum(c * X ** e[0] * Y ** e[1] * Z ** e[2] for e, c in p.terms.items())


def from_sympy(expr) -> HomPoly:
    return parse_poly(str(sympy.expand(expr)).replace("**", "^"), NAMES)


@st.composite
def hom_polys(draw, max_degree=3, max_terms=4):
    d = draw(st.integers(1, max_degree))
    n = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(n):
        a = draw(st.integers(0, d))
        b = draw(st.integers(0, d - a))
        terms[(a, b, d - a - b)] = draw(st.integers(-5, 5).filter(bool))
    return HomPoly.from_terms(3, terms, degree=d)


def test_pack_roundtrip():
    for e in [(0, 0, 0), (3, 1, 4), (1000, 0, 7)]:
        assert unpack(pack(e), 3) == e
    with pytest.raises(PolyError):
        pack((-1, 0, 0))


def test_parse_and_print():
    p = parse_poly("x^2 + 2*x*y - (y - z)^2", NAMES)
    assert p.degree == 2
    assert sympy.expand(to_sympy(p) - (X**2 + 2*X*Y - (Y - Z)**2)) == 0
    assert parse_poly(p.to_string(list(NAMES)), NAMES) == p


def test_parse_errors_carry_column():
    with pytest.raises(PolyParseError) as exc:
        parse_poly("x^2 + q", NAMES)
    assert exc.value.column == 7  # 1-based
    with pytest.raises(PolyError):
        parse_poly("x^2 + y", NAMES)  # not homogeneous


@settings(max_examples=60, deadline=None)
@given(hom_polys(), hom_polys())
def test_arithmetic_matches_sympy(p, q):
    assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0
    if p.degree == q.degree:
        assert sympy.expand(to_sympy(p + q) - to_sympy(p) - to_sympy(q)) == 0


@settings(max_examples=40, deadline=None)
@given(hom_polys(2, 3), hom_polys(2, 3), hom_polys(2, 3))
def test_gcd_matches_sympy(a, b, c):
    p, q = a * c, b * c
    g = gcd(p, q)
    # the package gcd is primitive; compare against sympy's primitive part
    expected = sympy.Poly(sympy.gcd(to_sympy(p), to_sympy(q)), X, Y, Z).primitive()[1].as_expr()
    assert sympy.expand(to_sympy(g) - expected) == 0 or sympy.expand(to_sympy(g) + expected) == 0
    assert p.divmod_exact(g) * g == p


def test_gcd_many_and_coprime():
    f = from_sympy((X + Y) * (X - Z))
    g = from_sympy((X + Y) * Y**2)
    h = from_sympy((X + Y) * Z * X)
    assert gcd_many([f, g, h]) == from_sympy(X + Y)
    assert certify_coprime([from_sympy(Y * Z), from_sympy(Z * X), from_sympy(X * Y)])
    assert not certify_coprime([f, g])


def test_derivative_and_division():
    p = from_sympy((X + 2 * Y) ** 3)
    assert sympy.expand(to_sympy(p.derivative(1)) - sympy.diff(to_sympy(p), Y)) == 0
    q, r = p.divide(from_sympy(X + 2 * Y))
    assert r.is_zero() and q == from_sympy((X + 2 * Y) ** 2)

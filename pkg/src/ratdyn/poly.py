"""Sparse homogeneous polynomials with exact integer coefficients.

Monomials are stored packed into a single Python int, one fixed-width
bit field per variable with variable 0 in the most significant field.
For polynomials of a single total degree, numeric order of packed keys
is graded lexicographic order, so sorting keys gives the canonical term
order used for printing, hashing and floating-point evaluation.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

FIELD_BITS = 20
FIELD_MASK = (1 << FIELD_BITS) - 1
MAX_EXPONENT = FIELD_MASK

# Prime below 2**31 so that products of residues fit in int64.
_PRIME = 2147483629


class PolyError(ValueError):
    """Rejected polynomial input."""


def pack(exponents: Sequence[int]) -> int:
    key = 0
    for e in exponents:
        if e < 0 or e > MAX_EXPONENT:
            raise PolyError(f"exponent {e} out of range")
        key = (key << FIELD_BITS) | e
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    out = [0] * nvars
    for j in range(nvars - 1, -1, -1):
        out[j] = key & FIELD_MASK
        key >>= FIELD_BITS
    return tuple(out)


def _unit(nvars: int, j: int) -> int:
    return 1 << (FIELD_BITS * (nvars - 1 - j))


class HomPoly:
    """Homogeneous polynomial in ``nvars`` variables over the integers.

    The zero polynomial keeps a nominal degree and is compatible with any
    degree in :meth:`__add__`.
    """

    __slots__ = ("nvars", "degree", "_terms", "_hash")

    def __init__(self, nvars: int, degree: int, terms: Mapping[int, int] | None = None,
                 *, _trusted: bool = False):
        self.nvars = nvars
        self.degree = degree
        self._hash = None
        if terms is None:
            self._terms = {}
        elif _trusted:
            self._terms = terms
        else:
            clean = {}
            for key, c in terms.items():
                if c:
                    if sum(unpack(key, nvars)) != degree:
                        raise PolyError(
                            f"monomial {format_monomial(unpack(key, nvars))} has degree "
                            f"{sum(unpack(key, nvars))}, expected {degree}")
                    clean[key] = int(c)
            self._terms = clean

    # -- construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Sequence[int], int],
                   degree: int | None = None) -> HomPoly:
        """Build from ``{exponent tuple: coefficient}``; degree inferred if omitted."""
        packed = {}
        degrees = set()
        for exps, c in terms.items():
            if len(exps) != nvars:
                raise PolyError(f"monomial {tuple(exps)} does not have {nvars} exponents")
            if c == 0:
                continue
            degrees.add(sum(exps))
            key = pack(exps)
            packed[key] = packed.get(key, 0) + int(c)
        if degree is None:
            if len(degrees) > 1:
                raise PolyError(f"not homogeneous: degrees {sorted(degrees)}")
            degree = degrees.pop() if degrees else 0
        return cls(nvars, degree, packed)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> HomPoly:
        n = len(exponents)
        return cls(n, sum(exponents), {pack(exponents): coeff} if coeff else {}, _trusted=True)

    @classmethod
    def variable(cls, nvars: int, j: int) -> HomPoly:
        return cls(nvars, 1, {_unit(nvars, j): 1}, _trusted=True)

    @classmethod
    def zero(cls, nvars: int, degree: int = 0) -> HomPoly:
        return cls(nvars, degree, {}, _trusted=True)

    @classmethod
    def constant(cls, nvars: int, c: int) -> HomPoly:
        return cls(nvars, 0, {0: c} if c else {}, _trusted=True)

    # -- inspection -------------------------------------------------------

    def keys(self) -> list[int]:
        """Packed monomials in canonical (descending graded lex) order."""
        return sorted(self._terms, reverse=True)

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        return {unpack(k, self.nvars): self._terms[k] for k in self.keys()}

    def raw_terms(self) -> dict[int, int]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def leading_term(self) -> tuple[tuple[int, ...], int]:
        if not self._terms:
            raise PolyError("zero polynomial has no leading term")
        k = max(self._terms)
        return unpack(k, self.nvars), self._terms[k]

    def leading_coeff(self) -> int:
        return self._terms[max(self._terms)]

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def min_exponents(self) -> tuple[int, ...]:
        """Exponents of the largest monomial dividing every term."""
        if not self._terms:
            return (0,) * self.nvars
        cols = zip(*(unpack(k, self.nvars) for k in self._terms))
        return tuple(min(c) for c in cols)

    def max_coeff_bits(self) -> int:
        return max((abs(c).bit_length() for c in self._terms.values()), default=0)

    def variables_used(self) -> list[int]:
        used = [False] * self.nvars
        for k in self._terms:
            for j, e in enumerate(unpack(k, self.nvars)):
                if e:
                    used[j] = True
        return [j for j in range(self.nvars) if used[j]]

    # -- ring operations --------------------------------------------------

    def _check(self, other: HomPoly) -> None:
        if self.nvars != other.nvars:
            raise PolyError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: HomPoly) -> HomPoly:
        if isinstance(other, int):
            other = HomPoly.constant(self.nvars, other)
        self._check(other)
        if self.degree != other.degree and self._terms and other._terms:
            raise PolyError(f"degree mismatch in add: {self.degree} vs {other.degree}")
        degree = self.degree if self._terms else other.degree
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return HomPoly(self.nvars, degree, out, _trusted=True)

    def __neg__(self) -> HomPoly:
        return HomPoly(self.nvars, self.degree, {k: -c for k, c in self._terms.items()},
                       _trusted=True)

    def __sub__(self, other: HomPoly) -> HomPoly:
        return self + (-other)

    def __mul__(self, other: HomPoly | int) -> HomPoly:
        if isinstance(other, int):
            if other == 0:
                return HomPoly.zero(self.nvars, self.degree)
            return HomPoly(self.nvars, self.degree,
                           {k: c * other for k, c in self._terms.items()}, _trusted=True)
        self._check(other)
        degree = self.degree + other.degree
        a, b = self._terms, other._terms
        if not a or not b:
            return HomPoly.zero(self.nvars, degree)
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            return HomPoly(self.nvars, degree, {k + kb: c * cb for k, c in a.items()},
                           _trusted=True)
        out: dict[int, int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return HomPoly(self.nvars, degree, {k: c for k, c in out.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def square(self) -> HomPoly:
        items = list(self._terms.items())
        out: dict[int, int] = {}
        get = out.get
        for i, (ka, ca) in enumerate(items):
            k = ka + ka
            out[k] = get(k, 0) + ca * ca
            c2 = 2 * ca
            for kb, cb in items[i + 1:]:
                k = ka + kb
                out[k] = get(k, 0) + c2 * cb
        return HomPoly(self.nvars, 2 * self.degree, {k: c for k, c in out.items() if c},
                       _trusted=True)

    def __pow__(self, n: int) -> HomPoly:
        if n < 0:
            raise PolyError("negative power")
        result = HomPoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.square()
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomPoly):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.degree if self._terms else None,
                               frozenset(self._terms.items())))
        return self._hash

    # -- content, division ------------------------------------------------

    def content(self) -> int:
        """Positive gcd of the coefficients."""
        if not self._terms:
            raise PolyError("content of the zero polynomial")
        return reduce(math.gcd, self._terms.values())

    def primitive(self) -> HomPoly:
        """Divide by content and make the leading coefficient positive."""
        c = self.content()
        if self.leading_coeff() < 0:
            c = -c
        if c == 1:
            return self
        return HomPoly(self.nvars, self.degree, {k: v // c for k, v in self._terms.items()},
                       _trusted=True)

    def exact_div_int(self, c: int) -> HomPoly:
        out = {}
        for k, v in self._terms.items():
            q, r = divmod(v, c)
            if r:
                raise PolyError(f"coefficient {v} not divisible by {c}")
            out[k] = q
        return HomPoly(self.nvars, self.degree, out, _trusted=True)

    def divide_monomial(self, exponents: Sequence[int]) -> HomPoly:
        shift = pack(exponents)
        if any(e > m for e, m in zip(exponents, self.min_exponents())) and self._terms:
            raise PolyError("monomial does not divide polynomial")
        return HomPoly(self.nvars, self.degree - sum(exponents),
                       {k - shift: c for k, c in self._terms.items()}, _trusted=True)

    def divmod_exact(self, other: HomPoly) -> HomPoly:
        """Exact quotient ``self / other``; raises PolyError if not exact."""
        q, r = self.divide(other)
        if not r.is_zero():
            raise PolyError("division is not exact")
        return q

    def divide(self, other: HomPoly) -> tuple[HomPoly, HomPoly]:
        """Lex-leading-term division, stopping at the first non-divisible leading term.

        Returns ``(q, r)`` with ``self == q*other + r``. ``r`` is zero exactly when
        ``other`` divides ``self`` in Z[x].
        """
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        qdeg = self.degree - other.degree
        if not self._terms:
            return HomPoly.zero(self.nvars, max(qdeg, 0)), self
        if qdeg < 0:
            return HomPoly.zero(self.nvars, 0), self
        n = self.nvars
        lk = max(other._terms)
        lc = other._terms[lk]
        lexp = unpack(lk, n)
        rest = [(k, c) for k, c in other._terms.items() if k != lk]
        rem = dict(self._terms)
        quot: dict[int, int] = {}
        import heapq
        heap = [-k for k in rem]
        heapq.heapify(heap)
        while heap:
            k = -heapq.heappop(heap)
            c = rem.get(k)
            if not c:
                continue
            # drop duplicates of this key still in the heap
            while heap and -heap[0] == k:
                heapq.heappop(heap)
            e = unpack(k, n)
            if any(a < b for a, b in zip(e, lexp)) or c % lc:
                heapq.heappush(heap, -k)
                break
            qc = c // lc
            qk = k - lk
            quot[qk] = qc
            del rem[k]
            for ok, oc in rest:
                t = qk + ok
                v = rem.get(t, 0) - qc * oc
                if v:
                    if t not in rem:
                        heapq.heappush(heap, -t)
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return (HomPoly(n, qdeg, quot, _trusted=True),
                HomPoly(n, self.degree, rem, _trusted=True))

    # -- calculus and evaluation ------------------------------------------

    def derivative(self, j: int) -> HomPoly:
        if not 0 <= j < self.nvars:
            raise PolyError(f"variable index {j} out of range")
        shift = FIELD_BITS * (self.nvars - 1 - j)
        unit = 1 << shift
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & FIELD_MASK
            if e:
                out[k - unit] = c * e
        return HomPoly(self.nvars, max(self.degree - 1, 0), out, _trusted=True)

    def exponent_array(self) -> tuple[np.ndarray, list[int]]:
        """Exponents (terms x nvars, canonical order) and matching coefficients."""
        keys = self.keys()
        exps = np.array([unpack(k, self.nvars) for k in keys], dtype=np.int64)
        return exps.reshape(len(keys), self.nvars), [self._terms[k] for k in keys]

    def __call__(self, point: Sequence[complex]) -> complex:
        return eval_complex(self, point)

    def substitute(self, values: Sequence[HomPoly]) -> HomPoly:
        """Compose with polynomials: ``self(values[0], ..., values[n-1])``."""
        return substitute_many([self], values)[0]

    # -- text -------------------------------------------------------------

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = default_names(self.nvars)
        if not self._terms:
            return "0"
        parts = []
        for i, k in enumerate(self.keys()):
            c = self._terms[k]
            mono = format_monomial(unpack(k, self.nvars), names)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"HomPoly({self.to_string()!r}, nvars={self.nvars}, degree={self.degree})"


def default_names(nvars: int) -> list[str]:
    if nvars <= 4:
        return ["x", "y", "z", "w"][:nvars]
    return [f"x{i}" for i in range(nvars)]


def format_monomial(exps: Sequence[int], names: Sequence[str] | None = None) -> str:
    if names is None:
        names = default_names(len(exps))
    factors = []
    for name, e in zip(names, exps):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return "*".join(factors) if factors else "1"


# ---------------------------------------------------------------------------
# module-level operations

def add(p: HomPoly, q: HomPoly) -> HomPoly:
    return p + q


def mul(p: HomPoly, q: HomPoly) -> HomPoly:
    if p is q:
        return p.square()
    return p * q


def content(p: HomPoly) -> int:
    return p.content()


def partial_derivative(p: HomPoly, var_index: int) -> HomPoly:
    return p.derivative(var_index)


def eval_complex(p: HomPoly, v: Sequence[complex]) -> complex:
    """Sum of terms in canonical order, double-precision complex."""
    v = [complex(x) for x in v]
    if len(v) != p.nvars:
        raise PolyError(f"point has {len(v)} coordinates, polynomial has {p.nvars} variables")
    total = 0j
    for k in p.keys():
        t = complex(p._terms[k])
        for x, e in zip(v, unpack(k, p.nvars)):
            if e:
                t *= x ** e
        total += t
    return total


def substitute_many(polys: Sequence[HomPoly], values: Sequence[HomPoly]) -> list[HomPoly]:
    """Evaluate several polynomials on the same tuple of polynomials.

    Powers of each value and products of powers are cached across all
    input polynomials, which matters when the values are large iterates.
    """
    if not polys:
        return []
    nv = polys[0].nvars
    if len(values) != nv:
        raise PolyError(f"need {nv} substitution values, got {len(values)}")
    tv = values[0].nvars
    vdeg = [v.degree for v in values]
    if len(set(vdeg)) > 1 and not all(v.is_zero() for v in values):
        nonzero = {v.degree for v in values if not v.is_zero()}
        if len(nonzero) > 1:
            raise PolyError("substituted polynomials must share a degree")
    d = max(vdeg)
    powers: list[dict[int, HomPoly]] = [{0: HomPoly.constant(tv, 1), 1: v} for v in values]

    def power(j: int, e: int) -> HomPoly:
        cache = powers[j]
        if e not in cache:
            half = power(j, e // 2)
            sq = half.square()
            cache[e] = sq * values[j] if e % 2 else sq
        return cache[e]

    products: dict[int, HomPoly] = {}

    def monomial_value(key: int) -> HomPoly:
        if key not in products:
            exps = unpack(key, nv)
            factors = [power(j, e) for j, e in enumerate(exps) if e]
            factors.sort(key=len)
            acc = factors[0] if factors else HomPoly.constant(tv, 1)
            for f in factors[1:]:
                acc = acc * f
            products[key] = acc
        return products[key]

    out = []
    for p in polys:
        acc: dict[int, int] = {}
        for key in p.keys():
            c = p._terms[key]
            for mk, mc in monomial_value(key)._terms.items():
                v = acc.get(mk, 0) + c * mc
                if v:
                    acc[mk] = v
                else:
                    acc.pop(mk, None)
        out.append(HomPoly(tv, p.degree * d, acc, _trusted=True))
    return out


# ---------------------------------------------------------------------------
# gcd

def _positive(p: HomPoly) -> HomPoly:
    return -p if p._terms and p.leading_coeff() < 0 else p


def _monomial_gcd(polys: Iterable[HomPoly]) -> tuple[int, ...]:
    mins = [p.min_exponents() for p in polys if not p.is_zero()]
    return tuple(min(c) for c in zip(*mins))


def _drop_variable(p: HomPoly, j: int) -> tuple[dict[int, HomPoly], int]:
    """Split p as sum_i c_i * x_j**i; the c_i live in nvars-1 variables."""
    n = p.nvars
    coeffs: dict[int, dict[int, int]] = {}
    for k, c in p._terms.items():
        exps = unpack(k, n)
        e = exps[j]
        rest = pack(exps[:j] + exps[j + 1:])
        coeffs.setdefault(e, {})[rest] = c
    return ({e: HomPoly(n - 1, p.degree - e, t, _trusted=True) for e, t in coeffs.items()},
            max(coeffs) if coeffs else 0)


def _lift_variable(coeffs: dict[int, HomPoly], j: int, n: int, degree: int) -> HomPoly:
    out = {}
    for e, c in coeffs.items():
        for k, v in c._terms.items():
            exps = unpack(k, n - 1)
            out[pack(exps[:j] + (e,) + exps[j:])] = v
    return HomPoly(n, degree, out, _trusted=True)


def _occurrences(p: HomPoly, j: int) -> int:
    shift = FIELD_BITS * (p.nvars - 1 - j)
    return sum(1 for k in p._terms if (k >> shift) & FIELD_MASK)


def _upoly_prem(a: list[HomPoly], b: list[HomPoly]) -> list[HomPoly]:
    """Pseudo-remainder of dense-in-x polynomials with HomPoly coefficients."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    nv = lb.nvars
    delta = len(a) - 1 - db
    if delta < 0:
        return a
    for _ in range(delta + 1):
        if len(a) - 1 < db:
            break
        la = a[-1]
        shift = len(a) - 1 - db
        new = [c * lb for c in a[:-1]]
        for i in range(db):
            if not b[i].is_zero():
                new[shift + i] = new[shift + i] - la * b[i]
        a = new
        while a and a[-1].is_zero():
            a.pop()
        if not a:
            return []
    # the classical prem multiplies by lb**(delta+1); extra factors only
    # change the result by a unit of the fraction field, which the
    # primitive-part step removes
    return a


def _gcd_recursive(p: HomPoly, q: HomPoly) -> HomPoly:
    """gcd of nonzero homogeneous polynomials, primitive and positive."""
    n = p.nvars
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()
    mono = _monomial_gcd([p, q])
    p = p.divide_monomial(p.min_exponents())
    q = q.divide_monomial(q.min_exponents())
    mono_poly = HomPoly.monomial(mono)
    cp, cq = p.content(), q.content()
    p, q = p.exact_div_int(cp), q.exact_div_int(cq)
    if p.degree == 0 or q.degree == 0:
        return mono_poly
    if p == q or p == -q:
        return _positive(mono_poly * p)
    vp, vq = set(p.variables_used()), set(q.variables_used())
    candidates = sorted(vp | vq, key=lambda j: (_occurrences(p, j) + _occurrences(q, j), j))
    # a variable occurring in only one of them: gcd divides every coefficient of it
    for j in candidates:
        if (j in vp) != (j in vq):
            holder, other = (p, q) if j in vp else (q, p)
            coeffs, _ = _drop_variable(holder, j)
            g = other
            for c in sorted(coeffs.values(), key=len):
                c_lift = _lift_variable({0: c}, j, n, c.degree)
                g = _gcd_recursive(g, c_lift)
                if g.degree == 0:
                    return mono_poly
            return _positive(mono_poly * g)
    if n == 1:
        return mono_poly
    j = candidates[0]
    pc, _ = _drop_variable(p, j)
    qc, _ = _drop_variable(q, j)
    # content with respect to x_j, computed in n-1 variables
    cont = None
    for c in sorted(list(pc.values()) + list(qc.values()), key=len):
        cont = c.primitive() if cont is None else _gcd_recursive(cont, c)
        if cont.degree == 0:
            break
    a = _dense(pc)
    b = _dense(qc)
    a = _upoly_primitive(a)
    b = _upoly_primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while len(b) > 1:
        r = _upoly_prem(a, b)
        if not r:
            break
        a, b = b, _upoly_primitive(r)
    if len(b) == 1:
        g_dense = [HomPoly.constant(n - 1, 1)]
    else:
        g_dense = b
    g = _lift_variable({i: c for i, c in enumerate(g_dense) if not c.is_zero()}, j, n,
                       max(c.degree + i for i, c in enumerate(g_dense) if not c.is_zero()))
    if cont is not None and cont.degree > 0:
        g = g * _lift_variable({0: cont}, j, n, cont.degree)
    return _positive((mono_poly * g).primitive())


def _dense(coeffs: dict[int, HomPoly]) -> list[HomPoly]:
    top = max(coeffs)
    any_c = next(iter(coeffs.values()))
    deg0 = any_c.degree + next(iter(coeffs))
    return [coeffs.get(i, HomPoly.zero(any_c.nvars, deg0 - i)) for i in range(top + 1)]


def _upoly_primitive(a: list[HomPoly]) -> list[HomPoly]:
    while a and a[-1].is_zero():
        a = a[:-1]
    nonzero = [c for c in a if not c.is_zero()]
    if not nonzero:
        return a
    g = None
    for c in sorted(nonzero, key=len):
        g = c.primitive() if g is None else _gcd_recursive(g, c)
        if g.degree == 0 and g.content() == 1:
            break
    if g.degree == 0:
        c = g.content()
        sign = -1 if a[-1].leading_coeff() < 0 else 1
        return [x.exact_div_int(sign * c) if not x.is_zero() else x for x in a]
    out = []
    for x in a:
        q = x.divmod_exact(g) if not x.is_zero() else HomPoly.zero(x.nvars, x.degree - g.degree)
        out.append(q)
    if out[-1].leading_coeff() < 0:
        out = [-x for x in out]
    return out


def gcd(p: HomPoly, q: HomPoly) -> HomPoly:
    """Primitive gcd with positive leading coefficient.

    Recursive primitive polynomial remainder sequences over a main variable
    chosen by fewest occurrences.
    """
    if p.nvars != q.nvars:
        raise PolyError("variable count mismatch")
    if p.is_zero() and q.is_zero():
        raise PolyError("gcd of two zero polynomials")
    return _gcd_recursive(p, q)


def gcd_many(polys: Sequence[HomPoly]) -> HomPoly:
    """gcd of a list, with a cheap modular coprimality certificate first."""
    nonzero = sorted((p for p in polys if not p.is_zero()), key=len)
    if not nonzero:
        raise PolyError("gcd of zero polynomials")
    nv = nonzero[0].nvars
    mono = _monomial_gcd(nonzero)
    stripped = [p.divide_monomial(mono) for p in nonzero]
    # a divisor of a monomial is a monomial, and no common monomial is left
    if any(p.is_monomial() for p in stripped) or certify_coprime(stripped):
        return HomPoly.monomial(mono)
    g = stripped[0].primitive()
    for p in stripped[1:]:
        if g.degree == 0:
            break
        g = _gcd_recursive(g, p)
    if g.degree == 0:
        return HomPoly.monomial(mono)
    return (HomPoly.monomial(mono) * g).primitive()


# ---------------------------------------------------------------------------
# modular coprimality certificate

def _modmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a * b) % _PRIME


def _eval_mod(p: HomPoly, points: np.ndarray) -> np.ndarray:
    """Values of p at integer points (rows) modulo the working prime."""
    npts = points.shape[0]
    keys = list(p._terms)
    exps = np.array([unpack(k, p.nvars) for k in keys], dtype=np.int64).reshape(-1, p.nvars)
    coeffs = np.array([c % _PRIME for c in p._terms.values()], dtype=np.int64)
    dmax = int(exps.max()) if exps.size else 0
    tables = []
    for j in range(p.nvars):
        tab = np.ones((npts, dmax + 1), dtype=np.int64)
        for e in range(1, dmax + 1):
            tab[:, e] = (tab[:, e - 1] * points[:, j]) % _PRIME
        tables.append(tab)
    out = np.zeros(npts, dtype=np.int64)
    chunk = max(1, 2_000_000 // max(npts, 1))
    for s in range(0, len(keys), chunk):
        acc = np.broadcast_to(coeffs[s:s + chunk], (npts, len(coeffs[s:s + chunk]))).copy()
        for j in range(p.nvars):
            acc = _modmul(acc, tables[j][:, exps[s:s + chunk, j]])
        out = (out + acc.sum(axis=1) % _PRIME) % _PRIME
    return out


def _interpolate_mod(ys: np.ndarray) -> np.ndarray:
    """Coefficients (low to high) of the polynomial through (m+1, ys[m]) mod p."""
    n = len(ys)
    xs = np.arange(1, n + 1, dtype=np.int64)
    coef = ys.copy()
    for j in range(1, n):
        # equispaced nodes: every divided difference at level j divides by j
        inv = pow(j, _PRIME - 2, _PRIME)
        coef[j:] = _modmul((coef[j:] - coef[j - 1:-1]) % _PRIME, np.int64(inv))
    poly = np.zeros(n, dtype=np.int64)
    poly[0] = coef[n - 1]
    deg = 0
    for j in range(n - 2, -1, -1):
        # poly <- poly * (t - xs[j]) + coef[j]
        shifted = np.zeros(n, dtype=np.int64)
        shifted[1:deg + 2] = poly[:deg + 1]
        shifted[:deg + 1] = (shifted[:deg + 1] - _modmul(poly[:deg + 1], xs[j])) % _PRIME
        shifted[0] = (shifted[0] + coef[j]) % _PRIME
        poly = shifted
        deg += 1
    return poly


def _trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    return a[:nz[-1] + 1] if len(nz) else a[:0]


def _ugcd_mod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = _trim(a), _trim(b)
    while len(b):
        inv = pow(int(b[-1]), _PRIME - 2, _PRIME)
        a = a.copy()
        while len(a) >= len(b):
            q = (int(a[-1]) * inv) % _PRIME
            s = len(a) - len(b)
            a[s:] = (a[s:] - _modmul(b, np.int64(q))) % _PRIME
            a = _trim(a)
            if not len(a):
                break
        a, b = b, a
    return a


def certify_coprime(polys: Sequence[HomPoly], seed: int = 0x5EED) -> bool:
    """True only if the polynomials provably share no nonconstant factor.

    Restricts to a random line modulo a prime. A common factor of positive
    degree survives restriction unless every restriction vanishes, so a
    trivial restricted gcd is a proof; False means "unknown".
    """
    polys = [p for p in polys if not p.is_zero()]
    if len(polys) < 2:
        return bool(polys) and polys[0].degree == 0
    if any(p.degree == 0 for p in polys):
        return True
    nv = polys[0].nvars
    rng = np.random.default_rng(seed)
    if nv == 1:
        return False
    base = rng.integers(1, _PRIME, size=nv, dtype=np.int64)
    direction = rng.integers(1, _PRIME, size=nv, dtype=np.int64)
    g = None
    s_mult = None
    for p in polys:
        d = p.degree
        if nv == 2:
            # a binary form is already its own restriction to the line
            r = np.zeros(d + 1, dtype=np.int64)
            for k, c in p._terms.items():
                r[unpack(k, 2)[1]] = c % _PRIME
            r = _trim(r)
        else:
            ts = np.arange(1, d + 2, dtype=np.int64)
            pts = (base[None, :] + _modmul(ts[:, None], direction[None, :])) % _PRIME
            r = _trim(_interpolate_mod(_eval_mod(p, pts)))
        if not len(r):
            continue
        mult = d - (len(r) - 1)
        s_mult = mult if s_mult is None else min(s_mult, mult)
        g = r if g is None else _ugcd_mod(g, r)
        if len(g) == 1 and s_mult == 0:
            return True
    if g is None:
        return False
    return len(g) == 1 and s_mult == 0

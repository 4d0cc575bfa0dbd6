"""Monomial maps u -> u^A on the torus: exact invariants from eigenvalues of A."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import HomPoly
from .ratmap import MapError, RationalMap, _int_det


@dataclass(frozen=True)
class MonomialMap:
    """Integer k x k matrix acting on torus exponents; row i gives component i."""

    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, matrix):
        rows = tuple(tuple(int(v) for v in row) for row in matrix)
        k = len(rows)
        if k == 0 or any(len(r) != k for r in rows):
            raise MapError("monomial matrix must be square and nonempty")
        object.__setattr__(self, "matrix", rows)
        if _int_det([list(r) for r in rows]) == 0:
            raise MapError("monomial matrix must have nonzero determinant (dominance)")

    @property
    def k(self) -> int:
        return len(self.matrix)

    @property
    def det(self) -> int:
        return _int_det([list(r) for r in self.matrix])

    def __matmul__(self, other: MonomialMap) -> MonomialMap:
        a, b = np.array(self.matrix, dtype=object), np.array(other.matrix, dtype=object)
        return MonomialMap((a @ b).tolist())

    def power(self, n: int) -> MonomialMap:
        out = MonomialMap(np.eye(self.k, dtype=int).tolist())
        for _ in range(n):
            out = out @ self
        return out


def homogenize(m: MonomialMap) -> RationalMap:
    """Reduced self-map of P^k restricting to u -> u^A on the torus.

    Affine coordinates are u_i = x_i / x_k. Component i is x^{A_i} / x_k^{|A_i|},
    the last component is 1; a common monomial clears negative exponents.
    """
    k = m.k
    rows = [list(r) + [-sum(r)] for r in m.matrix] + [[0] * (k + 1)]
    shift = [-min(rows[i][j] for i in range(k + 1)) for j in range(k + 1)]
    comps = [HomPoly.monomial([e + s for e, s in zip(row, shift)]) for row in rows]
    return RationalMap(comps, name=None)


def charpoly(m: MonomialMap) -> list[int]:
    """Integer characteristic polynomial coefficients, highest degree first."""
    # Faddeev-LeVerrier in exact arithmetic
    k = m.k
    A = [[Fraction(v) for v in row] for row in m.matrix]
    coeffs = [Fraction(1)]
    M = [[Fraction(0)] * k for _ in range(k)]
    for step in range(1, k + 1):
        # M <- A M + c_{step-1} I
        AM = [[sum(A[i][t] * M[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
        M = [[AM[i][j] + (coeffs[-1] if i == j else 0) for j in range(k)] for i in range(k)]
        AM = [[sum(A[i][t] * M[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
        c = -sum(AM[i][i] for i in range(k)) / step
        coeffs.append(c)
    return [int(c) for c in coeffs]


def eigenvalues(m: MonomialMap) -> np.ndarray:
    """Roots of the characteristic polynomial (companion matrix), Newton-polished."""
    cp = charpoly(m)
    roots = np.roots(np.array(cp, dtype=float))
    poly = np.poly1d(np.array(cp, dtype=float))
    dpoly = poly.deriv()
    out = []
    for r in roots:
        z = complex(r)
        for _ in range(20):
            d = dpoly(z)
            if d == 0:
                break
            step = poly(z) / d
            z -= step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        if abs(poly(z)) > 1e-12 * max(1.0, abs(z)) ** m.k and abs(poly(z)) > abs(poly(complex(r))):
            z = complex(r)
        out.append(z)
    return np.array(sorted(out, key=lambda z: (-abs(z), z.real, z.imag)))


def exact_dynamical_degrees(m: MonomialMap) -> list[float]:
    """lambda_l = product of the l largest eigenvalue moduli; lambda_k = |det A|."""
    mods = sorted((abs(z) for z in eigenvalues(m)), reverse=True)
    out = []
    for l in range(1, m.k + 1):
        best = max(math.prod(c) for c in itertools.combinations(mods, l))
        out.append(float(best))
    out[-1] = float(abs(m.det))
    return out


def exact_entropy(m: MonomialMap) -> float:
    """Sum of log|mu| over eigenvalues of modulus > 1."""
    return float(sum(max(0.0, math.log(abs(z))) for z in eigenvalues(m)))

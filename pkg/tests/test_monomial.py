"""Monomial maps: exact invariants against independent computations."""

import math

import numpy as np
import pytest

from ratdyn.monomial import (MonomialMap, charpoly, eigenvalues, exact_dynamical_degrees,
                             exact_entropy, homogenize)
from ratdyn.ratmap import compose, degree_sequence, iterate

GOLDEN_SQ = (3 + math.sqrt(5)) / 2
MATRICES = [[[2, 1], [1, 1]], [[2, 0], [0, 2]], [[1, 1, 0], [0, 1, 1], [1, 0, 0]],
            [[0, 1], [-1, 0]], [[3, -1], [2, 5]]]


@pytest.mark.parametrize("A", MATRICES)
def test_charpoly_matches_numpy(A):
    assert np.allclose(charpoly(MonomialMap(A)), np.poly(np.array(A, dtype=float)))


@pytest.mark.parametrize("A", MATRICES)
def test_eigenvalues_match_numpy(A):
    mods = sorted(abs(z) for z in eigenvalues(MonomialMap(A)))
    ref = sorted(abs(np.linalg.eigvals(np.array(A, dtype=float))))
    assert np.allclose(mods, ref, atol=1e-12)


@pytest.mark.parametrize("A", MATRICES[:3] + MATRICES[4:])
def test_homogenization_intertwines_powers(A):
    m = MonomialMap(A)
    assert homogenize(m.power(3)) == iterate(homogenize(m), 3)


def test_fibonacci_degrees_and_entropy():
    m = MonomialMap([[2, 1], [1, 1]])
    lam = exact_dynamical_degrees(m)
    assert lam[0] == pytest.approx(GOLDEN_SQ, rel=1e-12)
    assert lam[1] == 1.0
    assert exact_entropy(m) == pytest.approx(math.log(GOLDEN_SQ), rel=1e-12)
    seq = degree_sequence(homogenize(m), 10)
    assert abs(seq.values[10] / seq.values[9] - GOLDEN_SQ) / GOLDEN_SQ < 0.05


def test_p3_example():
    lam = exact_dynamical_degrees(MonomialMap([[1, 1, 0], [0, 1, 1], [1, 0, 0]]))
    # plastic-number-type cubic x^3 - 2x^2 + x - 1
    assert lam == pytest.approx([1.7548776662, 1.3247179572, 1.0], rel=1e-9)


def test_composition_is_matrix_product():
    a, b = MonomialMap([[2, 1], [1, 1]]), MonomialMap([[1, 0], [1, 1]])
    assert (a @ b).matrix == ((3, 1), (2, 1))
    assert a.det == 1
    assert homogenize(a @ b) == compose(homogenize(a), homogenize(b))

"""Rational maps: reduction, composition, degree sequences, documents."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_map
from ratdyn.ratmap import (DegreeBudget, IndeterminacyHit, MapError, NotDominantError,
                           ProjPoint, RationalMap, compose, conjugate, degree_sequence,
                           evaluate, fs_distance, indeterminacy_probe, iterate, load_map,
                           map_from_document, random_map)


def test_cremona_is_an_involution(cremona):
    assert compose(cremona, cremona).is_identity()
    assert degree_sequence(cremona, 6).values == [1, 2, 1, 2, 1, 2, 1]


def test_squares_and_henon_are_stable(squares, henon):
    assert degree_sequence(squares, 6).values == [2 ** n for n in range(7)]
    assert degree_sequence(henon, 8).values == [2 ** n for n in range(9)]


def test_reduction_removes_common_factor():
    f = make_map("x^2*y", "x*y^2", "x*y*z")
    assert f.is_identity()
    assert f.cancelled is not None and f.cancelled.degree == 2


def test_non_dominant_rejected():
    with pytest.raises(NotDominantError):
        make_map("x", "x", "y")


def _random_point(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return ProjPoint.from_coords(v)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_composition_matches_pointwise(seed, d1, d2):
    rng = np.random.default_rng(seed)
    f, g = random_map(2, d1, rng), random_map(2, d2, rng)
    fg = compose(f, g)
    assert fg.degree <= f.degree * g.degree
    x = _random_point(rng, 3)
    try:
        expected = evaluate(f, evaluate(g, x))
    except IndeterminacyHit:
        return
    assert fs_distance(evaluate(fg, x), expected) < 1e-6


def test_iterate_matches_repeated_composition(henon):
    assert iterate(henon, 3) == compose(henon, compose(henon, henon))


def test_budget_truncates_sequence(squares):
    seq = degree_sequence(squares, 10, DegreeBudget(max_degree=64))
    assert seq.truncated and seq.values == [1, 2, 4, 8, 16, 32, 64]
    assert seq.diagnostic


def test_fekete_quantities(squares):
    seq = degree_sequence(squares, 5)
    assert seq.ratios() == [2.0] * 5
    assert all(abs(r - 2.0) < 1e-12 for r in seq.running_inf())


def test_indeterminacy(cremona):
    with pytest.raises(IndeterminacyHit):
        evaluate(cremona, ProjPoint.from_coords([1, 0, 0]))
    probe = indeterminacy_probe(cremona, samples=16, seed=1)
    base = [ProjPoint.from_coords(v) for v in np.eye(3)]
    for b in base:
        assert min(fs_distance(b, p) for p in probe.points) < 1e-6


def test_conjugate_checks_inverse(henon, cremona, squares):
    h = conjugate(henon, cremona, cremona)
    assert h.dim_k == 2
    with pytest.raises(MapError):
        conjugate(henon, cremona, squares)


def test_document_roundtrip(henon):
    doc = henon.to_document()
    assert map_from_document(json.loads(json.dumps(doc))) == henon


def test_document_errors(tmp_path):
    with pytest.raises(MapError):
        map_from_document({"space": "P2", "components": ["x", "y"]})
    with pytest.raises(MapError):
        map_from_document({"space": "Q2", "components": ["x", "y", "z"]})
    with pytest.raises(MapError):
        map_from_document({"space": "P2", "monomial_matrix": [[1, 0, 0]]})
    bad = tmp_path / "bad.json"
    bad.write_text('{"space": "P2",\n "components": [x]}')
    with pytest.raises(MapError, match="line 2"):
        load_map(bad)


def test_rational_coefficients_are_cleared():
    f = map_from_document({"space": "P1", "components": ["x^2/2", "y^2/3"]})
    assert f == make_map("3*x^2", "2*y^2")


def test_cancellation_warns():
    with pytest.warns(UserWarning, match="cancelled"):
        map_from_document({"space": "P2", "components": ["x*y", "y^2", "y*z"]})


def test_linear_map_and_fs_distance():
    f = RationalMap.linear([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
    x = ProjPoint.from_coords([1, 1j, 0.5])
    y = evaluate(f, x)
    assert fs_distance(y, ProjPoint.from_coords([2 + 1j, 1 + 1j, 0.5])) < 1e-12
    assert math.isclose(fs_distance(ProjPoint.from_coords([1, 0]), ProjPoint.from_coords([0, 1])),
                        math.pi / 2)

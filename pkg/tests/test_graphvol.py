"""Graph volumes: chain rule, tuple bookkeeping, exact P^1 volumes."""

import math

import numpy as np
import pytest

from conftest import make_map
from ratdyn.fubini import cholesky_reduce, fs_points, pullback_pencil
from ratdyn.graphvol import (fit_range, graph_volume, jacobian_path, lov_estimate,
                             sorted_tuples, volume_terms, volume_terms_ordered, _paths)
from ratdyn.ratmap import ProjPoint, iterate


def test_chain_rule_matches_iterate(henon, rng):
    x = ProjPoint.from_coords(rng.standard_normal(3) + 1j * rng.standard_normal(3))
    path = jacobian_path(henon, x, 4)
    for i in range(1, 4):
        P, G, hit, _ = pullback_pencil(iterate(henon, i), np.asarray(x.coords)[None])
        assert not hit[0]
        assert np.allclose(path.pullback_metrics[i], P[0], rtol=1e-8, atol=1e-12)
    assert np.allclose(path.pullback_metrics[0], G[0])


def test_sorted_tuples_count():
    for n, k in [(4, 2), (3, 3), (5, 1)]:
        assert sum(m for _, m in sorted_tuples(n, k)) == n ** k


def test_sorted_equals_ordered(squares):
    x = fs_points(2, seed=4, count=64)
    H, alive, *_ = _paths(squares, x, 4)
    Hr = cholesky_reduce(H, H[:, :1])[alive]
    fast = volume_terms(Hr, 4)
    for n in range(1, 5):
        assert np.allclose(fast[:, n - 1], volume_terms_ordered(Hr[:, :n], n), rtol=1e-12)


def test_identity_volume_is_n_to_the_k():
    est = lov_estimate(make_map("x", "y", "z"), n_max=5, samples=500, seed=0)
    assert np.allclose(est.volumes, [n * n for n in range(1, 6)], rtol=1e-12)


def test_z_squared_volumes_match_exact(z_squared):
    # vol(Gamma_n) on P^1 is sum_{i<n} deg f^i = 2^n - 1
    est = lov_estimate(z_squared, n_max=8, samples=100_000, seed=5)
    for n, v, se in zip(est.n_values, est.volumes, est.std_errors):
        assert abs(v - (2 ** n - 1)) <= 3 * se + 1e-9
    assert est.lower_bound_ok
    assert abs(est.lov_fit - math.log(2)) < 0.1


def test_volumes_increase_and_bound(squares):
    est = lov_estimate(squares, n_max=4, samples=4000, seed=1)
    assert est.volumes[0] == pytest.approx(1.0)
    assert all(b > a for a, b in zip(est.volumes, est.volumes[1:]))
    assert est.lower_bound_ok
    assert graph_volume(squares, 4, samples=4000, seed=1) == est.volumes[-1]


def test_fit_range():
    assert fit_range(8) == [5, 8]
    assert fit_range(5) == [4, 5]
    assert fit_range(1) == [1, 1]


def test_report_keys(cremona):
    rep = lov_estimate(cremona, n_max=3, samples=200).report()
    assert set(rep) == {"n", "vol", "lov_fit", "lower_bound_ok"}

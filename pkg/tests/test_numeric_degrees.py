"""FS sampling, pullback spectra, delta_l estimates and the mixed discriminant."""

import itertools
import math

import numpy as np
import pytest
from scipy import stats

from conftest import make_map
from ratdyn.fubini import CHUNK, fs_chunk, fs_points, pencil_eigenvalues, elementary_symmetric
from ratdyn.numeric_degrees import (ChunkedMoments, delta_l_estimate, mixed_discriminant_batch,
                                    mixed_wedge_coefficient, pullback_spectrum,
                                    topological_degree_estimate)
from ratdyn.ratmap import IndeterminacyHit, ProjPoint


# ---------------------------------------------------------------------------
# brute-force exterior algebra over generators dz_1..dz_k, dzbar_1..dzbar_k


def _reorder_sign(gens):
    """Sign taking a product of distinct generators to canonical order, 0 on repeats."""
    if len(set(gens)) < len(gens):
        return 0
    inv = sum(1 for i in range(len(gens)) for j in range(i + 1, len(gens)) if gens[i] > gens[j])
    return -1 if inv % 2 else 1


def wedge_top_coefficient(mats):
    """Coefficient of prod_j (dz_j ^ dzbar_j) in the wedge of the (1,1)-forms sum H_ab dz_a ^ dzbar_b."""
    k = len(mats)
    canon = [g for j in range(k) for g in (2 * j, 2 * j + 1)]      # dz_j -> 2j, dzbar_j -> 2j+1
    ref = _reorder_sign(canon)
    total = 0j
    for a in itertools.product(range(k), repeat=k):
        if len(set(a)) < k:
            continue
        for b in itertools.permutations(range(k)):
            gens = [g for j in range(k) for g in (2 * a[j], 2 * b[j] + 1)]
            s = _reorder_sign(gens) * ref
            term = 1
            for j in range(k):
                term *= mats[j][a[j], b[j]]
            total += s * term
    return total


def random_psd(rng, k, rank=None):
    r = rank or k
    A = rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))
    return A @ A.conj().T


def random_hermitian(rng, k):
    A = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return A + A.conj().T


@pytest.mark.parametrize("k", [2, 3])
def test_spectral_density_matches_exterior_algebra(k):
    rng = np.random.default_rng(k)
    worst = 0.0
    for _ in range(1000):
        P = random_psd(rng, k, rank=int(rng.integers(1, k + 1)))
        G = random_psd(rng, k) + 0.1 * np.eye(k)
        nu = pencil_eigenvalues(P[None], G[None])[0]
        vol = wedge_top_coefficient([G] * k)
        for l in range(1, k + 1):
            ref = wedge_top_coefficient([P] * l + [G] * (k - l)) / vol
            got = elementary_symmetric(nu, l) / math.comb(k, l)
            worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    assert worst < 1e-10


@pytest.mark.parametrize("k", [2, 3])
def test_mixed_discriminant_properties(k):
    rng = np.random.default_rng(10 + k)
    eye = np.eye(k)
    worst = 0.0
    for _ in range(1000):
        H = [random_hermitian(rng, k) for _ in range(k)]
        K = random_hermitian(rng, k)
        a, b = rng.standard_normal(2)
        d = mixed_wedge_coefficient(H)
        ref = wedge_top_coefficient(H) / wedge_top_coefficient([eye] * k)
        perm = rng.permutation(k)
        lin = mixed_wedge_coefficient([a * H[0] + b * K] + H[1:])
        checks = [
            d - ref.real,
            d - mixed_wedge_coefficient([H[i] for i in perm]),
            lin - a * d - b * mixed_wedge_coefficient([K] + H[1:]),
            mixed_wedge_coefficient([H[0]] * k) - np.linalg.det(H[0]).real,
            d - mixed_discriminant_batch([h[None] for h in H])[0],
        ]
        scale = max(1.0, abs(d), abs(lin))
        worst = max(worst, max(abs(c) for c in checks) / scale)
    assert mixed_wedge_coefficient([eye] * k) == pytest.approx(1.0, abs=1e-14)
    assert worst < 1e-10


def test_mixed_discriminant_rejects_non_hermitian():
    with pytest.raises(ValueError):
        mixed_wedge_coefficient([np.array([[1, 2], [0, 1]]), np.eye(2)])


# ---------------------------------------------------------------------------
# sampling


@pytest.mark.parametrize("k", [1, 2, 3])
def test_fs_samples_are_uniform(k):
    # for FS-uniform points |x_0|^2 / |x|^2 ~ Beta(1, k)
    x = fs_points(k, seed=7, count=20000)
    u = np.abs(x[:, 0]) ** 2
    assert stats.kstest(u, stats.beta(1, k).cdf).pvalue > 1e-3


def test_chunks_are_independent_of_request_size():
    a = fs_points(2, seed=3, count=3 * CHUNK)
    b = fs_points(2, seed=3, count=10, start=CHUNK + 5)
    assert np.array_equal(a[CHUNK + 5:CHUNK + 15], b)
    assert np.array_equal(fs_chunk(2, 3, 1), a[CHUNK:2 * CHUNK])
    assert not np.array_equal(fs_chunk(2, 3, 0, stream=1), a[:CHUNK])


# ---------------------------------------------------------------------------
# pullback spectra


def test_z_squared_closed_form(z_squared, rng):
    # density of f^*w for z -> z^2: 4|z|^2 (1+|z|^2)^2 / (1+|z|^4)^2
    for _ in range(50):
        z = complex(*rng.standard_normal(2)) * 2
        nu = pullback_spectrum(z_squared, ProjPoint.from_coords([z, 1]))
        r = abs(z) ** 2
        assert nu.e(1) == pytest.approx(4 * r * (1 + r) ** 2 / (1 + r * r) ** 2, rel=1e-10)


def test_identity_spectrum_is_one():
    f = make_map("x", "y", "z")
    nu = pullback_spectrum(f, ProjPoint.from_coords([0.3, 1j, 2]))
    assert np.allclose(nu.nu, 1.0)


def test_spectrum_at_indeterminacy_raises(cremona):
    with pytest.raises(IndeterminacyHit):
        pullback_spectrum(cremona, ProjPoint.from_coords([0, 0, 1]))


def test_chunked_moments_match_numpy(rng):
    v = rng.standard_normal(10000) * 3 + 1
    acc = ChunkedMoments()
    for part in np.array_split(v, 7):
        acc.add_chunk(part)
    assert acc.mean == pytest.approx(v.mean(), rel=1e-12)
    assert acc.std_error == pytest.approx(v.std(ddof=1) / math.sqrt(v.size), rel=1e-10)


# ---------------------------------------------------------------------------
# degree estimates


def test_squares_degrees(squares):
    d1 = delta_l_estimate(squares, 1, samples=20000, seed=1)
    assert abs(d1.mean - 2) < 3 * d1.std_error + 1e-12
    top = topological_degree_estimate(squares, samples=20000, seed=1)
    assert top.rounded == 4 and not top.warnings


def test_henon_topological_degree(henon, rng):
    # preimage-count oracle: affine Henon (x, y) -> (x^2 + 1 - y, x) has the
    # unique inverse (X, Y) -> (Y, Y^2 + 1 - X)
    for _ in range(20):
        X, Y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        x, y = Y, Y * Y + 1 - X
        assert np.allclose([x * x + 1 - y, x], [X, Y])
    top = topological_degree_estimate(henon, samples=40000, seed=2)
    assert top.rounded == 1


def test_estimates_are_deterministic(cremona):
    a = delta_l_estimate(cremona, 1, samples=5000, seed=9)
    b = delta_l_estimate(cremona, 1, samples=5000, seed=9)
    assert a.to_dict() == b.to_dict()
    c = delta_l_estimate(cremona, 1, samples=5000, seed=10)
    assert c.mean != a.mean


def test_invalid_order(squares):
    with pytest.raises(ValueError):
        delta_l_estimate(squares, 3, samples=10)

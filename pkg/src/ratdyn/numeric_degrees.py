"""Monte-Carlo estimation of the degrees delta_l(f) over Fubini-Study volume.

At a point x off the indeterminacy locus, the pulled-back FS metric and the
FS metric at x form a Hermitian pencil with non-negative eigenvalues nu.
The density of f^*(w^l) ^ w^(k-l) against w^k is e_l(nu) / C(k, l).
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from dataclasses import asdict, dataclass, field

import numpy as np

from .fubini import (CHUNK, STREAM_SAMPLES, elementary_symmetric, fs_chunk,
                     pencil_eigenvalues, pullback_pencil)
from .ratmap import IndeterminacyHit, ProjPoint, RationalMap

DISCARD_WARN = 0.05
RESIDUAL_WARN = 0.2
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class PullbackSpectrum:
    nu: np.ndarray

    def e(self, l: int) -> float:
        return float(elementary_symmetric(self.nu[None, :], l)[0])


@dataclass
class DegreeEstimate:
    l: int
    mean: float
    std_error: float
    samples: int
    seed: int
    discarded: int
    warnings: list[str] = field(default_factory=list)
    rounded: int | None = None
    residual: float | None = None

    @property
    def kept(self) -> int:
        return self.samples - self.discarded

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.rounded is None:
            d.pop("rounded")
            d.pop("residual")
        return d


def pullback_spectrum(f: RationalMap, x: ProjPoint) -> PullbackSpectrum:
    P, G, hit, _ = pullback_pencil(f, np.asarray(x.coords, dtype=complex)[None, :])
    if hit[0]:
        raise IndeterminacyHit(f"f is indeterminate (or non-finite) at {x}")
    return PullbackSpectrum(pencil_eigenvalues(P, G)[0])


class ChunkedMoments:
    """Fixed-order merge of per-chunk (count, mean, M2) triples."""

    def __init__(self) -> None:
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add_chunk(self, values: np.ndarray) -> None:
        nb = values.size
        if nb == 0:
            return
        mb = float(np.mean(values))
        m2b = float(np.sum((values - mb) ** 2))
        n = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self.m2 += m2b + delta * delta * self.n * nb / n
        self.n = n

    @property
    def std_error(self) -> float:
        if self.n < 2:
            return float("nan")
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def _check_l(f: RationalMap, l: int) -> None:
    if not 1 <= l <= f.dim_k:
        raise ValueError(f"order l must satisfy 1 <= l <= {f.dim_k}, got {l}")


def delta_l_estimate(f: RationalMap, l: int, samples: int = 100_000, seed: int = 0) -> DegreeEstimate:
    """Sample mean of e_l(nu)/C(k,l) over FS-random points; hits are discarded."""
    _check_l(f, l)
    k = f.dim_k
    norm = math.comb(k, l)
    acc = ChunkedMoments()
    discarded = 0
    for c in range(-(-samples // CHUNK)):
        x = fs_chunk(k, seed, c, STREAM_SAMPLES)[: samples - c * CHUNK]
        P, G, hit, _ = pullback_pencil(f, x)
        vals = elementary_symmetric(pencil_eigenvalues(P, G), l) / norm
        bad = hit | ~np.isfinite(vals)
        discarded += int(np.count_nonzero(bad))
        acc.add_chunk(vals[~bad])
    est = DegreeEstimate(l=l, mean=acc.mean, std_error=acc.std_error, samples=samples,
                         seed=seed, discarded=discarded)
    if samples and discarded / samples > DISCARD_WARN:
        est.warnings.append(f"discard rate {discarded / samples:.1%} exceeds "
                            f"{DISCARD_WARN:.0%}: large near-indeterminate region")
    return est


def topological_degree_estimate(f: RationalMap, samples: int = 100_000, seed: int = 0) -> DegreeEstimate:
    est = delta_l_estimate(f, f.dim_k, samples, seed)
    est.rounded = int(round(est.mean))
    est.residual = abs(est.mean - est.rounded)
    if est.residual > RESIDUAL_WARN:
        est.warnings.append(f"unresolved: rounding residual {est.residual:.3f} > {RESIDUAL_WARN}")
    return est


def _check_hermitian(H: np.ndarray) -> None:
    asym = np.max(np.abs(H - np.conj(np.swapaxes(H, -1, -2))), initial=0.0)
    if asym > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3g})")


def mixed_wedge_coefficient(H_list) -> float:
    """Normalized mixed discriminant D(H_1, ..., H_k).

    D is symmetric and multilinear with D(H, ..., H) = det H, computed as
    (1/k!) * sum over permutations s of det[H_{s(1)}[:,0], ..., H_{s(k)}[:,k-1]].
    """
    mats = [np.asarray(H, dtype=complex) for H in H_list]
    k = len(mats)
    if k == 0 or any(H.shape != (k, k) for H in mats):
        raise ValueError(f"need k Hermitian k x k matrices, got {[H.shape for H in mats]}")
    for H in mats:
        _check_hermitian(H)
    total = 0j
    for perm in itertools.permutations(range(k)):
        cols = np.stack([mats[perm[j]][:, j] for j in range(k)], axis=1)
        total += np.linalg.det(cols)
    return float(total.real / math.factorial(k))


@lru_cache(maxsize=None)
def _signed_pairs(k: int) -> list[tuple[float, tuple[int, ...], tuple[int, ...]]]:
    """All (sign(s) sign(t), s, t) over pairs of permutations of range(k)."""
    perms = list(itertools.permutations(range(k)))

    def sign(p):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        return -1.0 if inv % 2 else 1.0

    return [(sign(s) * sign(t), s, t) for s in perms for t in perms]


def mixed_discriminant_batch(mats: list[np.ndarray]) -> np.ndarray:
    """Vectorized D over a leading batch axis; mats is a list of k arrays (N, k, k).

    Uses D(M_1..M_k) = (1/k!) sum_{s,t} sgn(s) sgn(t) prod_j M_j[s_j, t_j], which
    equals the permutation-column formula after expanding each determinant.
    """
    k = len(mats)
    if k == 1:
        return mats[0][:, 0, 0].real
    if k == 2:
        A, B = mats
        v = A[:, 0, 0] * B[:, 1, 1] + A[:, 1, 1] * B[:, 0, 0] \
            - A[:, 0, 1] * B[:, 1, 0] - A[:, 1, 0] * B[:, 0, 1]
        return (v / 2).real
    total = np.zeros(mats[0].shape[0], dtype=complex)
    for sg, s, t in _signed_pairs(k):
        term = mats[0][:, s[0], t[0]]
        for j in range(1, k):
            term = term * mats[j][:, s[j], t[j]]
        total += sg * term
    return (total / math.factorial(k)).real

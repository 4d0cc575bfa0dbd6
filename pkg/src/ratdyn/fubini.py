"""Fubini-Study geometry in max-modulus charts, and reproducible sampling.

All routines are batched over a leading sample axis. A point is a row of
homogeneous coordinates; its chart is the index of the coordinate of
largest modulus, and chart coordinates are the remaining coordinates
divided by that one (so every chart coordinate has modulus <= 1).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .ratmap import ProjPoint, RationalMap

CHUNK = 4096

# stream ids keep independent uses of one seed apart
STREAM_SAMPLES = 0
STREAM_CLOUD = 1


def _generator(seed: int, chunk: int, stream: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, (stream << 40) | chunk], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def fs_chunk(k: int, seed: int, chunk: int, stream: int = STREAM_SAMPLES) -> np.ndarray:
    """CHUNK unit vectors in C^{k+1}, FS-distributed as points of P^k.

    Sample index i lives in chunk i // CHUNK, row i % CHUNK; a chunk depends
    only on (seed, stream, chunk), never on how many chunks are drawn.
    """
    g = _generator(seed, chunk, stream).standard_normal((CHUNK, k + 1, 2))
    v = g[..., 0] + 1j * g[..., 1]
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def fs_points(k: int, seed: int, count: int, start: int = 0,
              stream: int = STREAM_SAMPLES) -> np.ndarray:
    out = []
    first, last = start // CHUNK, (start + count - 1) // CHUNK
    for c in range(first, last + 1):
        block = fs_chunk(k, seed, c, stream)
        lo = max(start - c * CHUNK, 0)
        hi = min(start + count - c * CHUNK, CHUNK)
        out.append(block[lo:hi])
    return np.concatenate(out) if out else np.zeros((0, k + 1), dtype=complex)


def sample_fs(seed: int, index: int = 0, k: int = 2) -> ProjPoint:
    """The index-th FS-random point of P^k for this seed."""
    return ProjPoint.from_coords(fs_chunk(k, seed, index // CHUNK)[index % CHUNK])


@lru_cache(maxsize=None)
def _others(n: int) -> np.ndarray:
    return np.array([[j for j in range(n) if j != a] for a in range(n)], dtype=np.int64)


def normalize_rows(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale rows so the max-modulus coordinate is exactly 1; return (x, chart)."""
    rows = np.arange(x.shape[0])
    a = np.argmax(np.abs(x), axis=1)
    xn = x / x[rows, a][:, None]
    xn[rows, a] = 1.0
    return xn, a


def chart_coords(xn: np.ndarray, a: np.ndarray) -> np.ndarray:
    idx = _others(xn.shape[1])[a]
    return np.take_along_axis(xn, idx, axis=1)


def fs_metric(z: np.ndarray) -> np.ndarray:
    """Hermitian FS metric matrices [(1+|z|^2) I - z z^H] / (1+|z|^2)^2 in a chart.

    The convention is h(v) = v^H M v; the overall constant is irrelevant
    because it cancels in every ratio taken against the same metric.
    """
    k = z.shape[1]
    s = 1.0 + np.sum(np.abs(z) ** 2, axis=1)
    eye = np.eye(k)[None, :, :]
    outer = z[:, :, None] * z.conj()[:, None, :]
    return (s[:, None, None] * eye - outer) / (s ** 2)[:, None, None]


def fs_unit(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def fs_distance_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    ov = np.abs(np.sum(fs_unit(x).conj() * fs_unit(y), axis=-1))
    return np.arccos(np.clip(ov, 0.0, 1.0))


class ChartStep:
    """One application of f to a batch: image points and chart Jacobians.

    Attributes: ``image`` (normalized homogeneous image rows), ``image_chart``,
    ``jac`` (N, k, k) derivative from the source chart to the image chart,
    and ``hit`` marking indeterminacy hits or non-finite data.
    """

    __slots__ = ("image", "image_chart", "jac", "hit")

    def __init__(self, f: RationalMap, xn: np.ndarray, a: np.ndarray):
        n = f.nvars
        ev = f.evaluator
        vals, hit = ev.values_and_hits(xn)
        jh = ev.jacobian(xn)
        rows = np.arange(xn.shape[0])
        b = np.argmax(np.abs(vals), axis=1)
        fb = vals[rows, b]
        fb = np.where(hit, 1.0, fb)
        w = vals / fb[:, None]
        # d(F_j/F_b)/dx_m = (dF_j/dx_m - w_j dF_b/dx_m) / F_b
        num = jh - w[:, :, None] * jh[rows, b][:, None, :]
        num = num / fb[:, None, None]
        oa = _others(n)[a]
        ob = _others(n)[b]
        jac = np.take_along_axis(num, ob[:, :, None], axis=1)
        jac = np.take_along_axis(jac, oa[:, None, :], axis=2)
        w[rows, b] = 1.0
        bad = hit | ~np.all(np.isfinite(jac.reshape(len(rows), -1)), axis=1) \
            | ~np.all(np.isfinite(w), axis=1)
        self.image = np.where(bad[:, None], 1.0, w)
        self.image_chart = b
        self.jac = np.where(bad[:, None, None], 0.0, jac)
        self.hit = bad


def cholesky_reduce(H: np.ndarray, G: np.ndarray) -> np.ndarray:
    """L^{-1} H L^{-H} with G = L L^H; pencil eigenvalues become plain ones."""
    L = np.linalg.cholesky(G)
    Linv = np.linalg.inv(L)
    R = Linv @ H @ np.conj(np.swapaxes(Linv, -1, -2))
    return 0.5 * (R + np.conj(np.swapaxes(R, -1, -2)))


def pullback_pencil(f: RationalMap, x: np.ndarray):
    """Return (P, G, hit, step): P = J^H M(f(x)) J and G = M(x) in charts."""
    xn, a = normalize_rows(np.asarray(x, dtype=complex))
    step = ChartStep(f, xn, a)
    G = fs_metric(chart_coords(xn, a))
    W = fs_metric(chart_coords(step.image, step.image_chart))
    J = step.jac
    P = np.conj(np.swapaxes(J, -1, -2)) @ W @ J
    return P, G, step.hit, step


def pencil_eigenvalues(P: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Generalized eigenvalues of P relative to G, ascending; roundoff negatives clipped."""
    nu = np.linalg.eigvalsh(cholesky_reduce(P, G))
    return np.where((nu < 0) & (nu >= -1e-10), 0.0, nu)


def elementary_symmetric(nu: np.ndarray, l: int) -> np.ndarray:
    """e_l of the last axis."""
    e = [np.ones(nu.shape[:-1])] + [np.zeros(nu.shape[:-1]) for _ in range(nu.shape[-1])]
    for i in range(nu.shape[-1]):
        v = nu[..., i]
        for j in range(i + 1, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e[l]

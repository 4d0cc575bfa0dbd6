"""Lower estimates of topological entropy from (n, eps)-separated orbit sets.

Orbits are grown from FS-random starts; for each horizon m and scale eps a
greedy maximal separated subset is built under the Bowen distance
max_{i<m} d_FS(f^i x, f^i y). The growth rate of its size in m is the
estimate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .fubini import CHUNK, STREAM_CLOUD, fs_chunk, fs_unit
from .ratmap import IndeterminacyProbe, RationalMap, indeterminacy_probe


class CloudError(RuntimeError):
    pass


@dataclass
class OrbitCloud:
    """Unit representatives of surviving orbits, shape (N, n, k+1)."""

    orbits: np.ndarray
    n: int
    eta: float
    seed: int
    requested: int
    dropped: int

    def __len__(self) -> int:
        return self.orbits.shape[0]


def grow_cloud(f: RationalMap, count: int, n: int, eta: float = 1e-3, seed: int = 0,
               probe: IndeterminacyProbe | None = None) -> OrbitCloud:
    """Orbits of length n from `count` FS-random starts; near-indeterminate ones are dropped."""
    if n < 2:
        raise ValueError("orbit length n must be >= 2")
    if eta <= 0:
        raise ValueError("eta must be positive")
    if probe is None:
        probe = indeterminacy_probe(f, seed=seed)
    k = f.dim_k
    ev = f.evaluator
    chunks = [fs_chunk(k, seed, c, STREAM_CLOUD) for c in range(-(-count // CHUNK))]
    x = np.concatenate(chunks)[:count] if chunks else np.zeros((0, k + 1), complex)
    alive = np.ones(count, dtype=bool)
    orbit = np.empty((count, n, k + 1), dtype=complex)
    for i in range(n):
        alive &= probe.min_distance(x) >= eta
        orbit[:, i] = x
        if i == n - 1:
            break
        vals, hit = ev.values_and_hits(x)
        alive &= ~hit
        vals[~alive] = 1.0
        x = fs_unit(vals)
    survivors = int(np.count_nonzero(alive))
    if survivors < count / 10:
        raise CloudError(f"only {survivors} of {count} orbits avoided the eta={eta} "
                         f"neighbourhood of indeterminacy; try a larger eta or another map")
    return OrbitCloud(orbits=orbit[alive], n=n, eta=eta, seed=seed, requested=count,
                      dropped=count - survivors)


def _embed(u: np.ndarray) -> np.ndarray:
    """Real coordinates of the projector u u^H (diagonal, sqrt(2) * upper triangle).

    Euclidean distance between embeddings of unit vectors equals the
    Frobenius distance of the projectors, which is sqrt(2) sin d_FS(u, v).
    """
    P = u[..., :, None] * u[..., None, :].conj()
    iu = np.triu_indices(u.shape[-1], 1)
    diag = np.diagonal(P, axis1=-2, axis2=-1).real
    off = math.sqrt(2.0) * P[..., iu[0], iu[1]]
    return np.concatenate([diag, off.real, off.imag], axis=-1)


PAIR_CAP = 3_000_000
_PAIR_BATCH = 1_000_000


def _close_at(orbits: np.ndarray, pairs: np.ndarray, t: int, cos_eps: float) -> np.ndarray:
    """Mask of pairs whose points are closer than eps at time t."""
    keep = np.empty(len(pairs), dtype=bool)
    for s in range(0, len(pairs), _PAIR_BATCH):
        p = pairs[s:s + _PAIR_BATCH]
        ov = np.abs(np.sum(orbits[p[:, 0], t].conj() * orbits[p[:, 1], t], axis=1))
        keep[s:s + _PAIR_BATCH] = ov > cos_eps
    return keep


class _Separator:
    """Greedy maximal (m, eps)-separated subsets for m = 1, 2, ... in turn.

    While close pairs are too numerous to store, each kept orbit queries a
    KD-tree; once they fit, the list of pairs closer than eps over the
    current horizon is built once and only filtered as m grows (closeness
    over a longer horizon implies closeness over a shorter one).
    """

    def __init__(self, orbits: np.ndarray, emb: np.ndarray, epsilon: float):
        self.orbits = orbits
        self.emb = emb
        self.N = orbits.shape[0]
        self.cos_eps = math.cos(epsilon)
        # embedding distance of points at FS distance eps, slightly inflated
        self.radius = math.sqrt(2.0) * math.sin(min(epsilon, math.pi / 2)) * (1 + 1e-9)
        self.pairs: np.ndarray | None = None

    def sets(self, n: int, seeds: list[np.ndarray] | None):
        for m in range(1, n + 1):
            seed = None if seeds is None else seeds[m - 1]
            if self.pairs is None:
                # pairs close at times 0 and m-1 are within sqrt(2) r jointly
                times = [0] if m == 1 else [0, m - 1]
                tree = cKDTree(np.ascontiguousarray(self.emb[:, times].reshape(self.N, -1)),
                               balanced_tree=False, compact_nodes=False)
                radius = self.radius * math.sqrt(len(times))
                if self._pair_estimate(tree, radius) <= PAIR_CAP:
                    pairs = tree.query_pairs(radius, output_type="ndarray").astype(np.int32)
                    for t in range(m - 1):
                        pairs = pairs[_close_at(self.orbits, pairs, t, self.cos_eps)]
                    self.pairs = pairs
                else:
                    yield self._lazy(tree, radius, m, seed)
                    continue
            self.pairs = self.pairs[_close_at(self.orbits, self.pairs, m - 1, self.cos_eps)]
            yield self._from_pairs(seed)

    def _pair_estimate(self, tree, radius: float) -> float:
        """Number of close pairs extrapolated from an evenly strided subsample."""
        step = max(1, self.N // 2000)
        sub = tree.data[::step]
        hits = tree.query_ball_point(sub, radius, return_length=True)
        return float(np.sum(hits - 1)) * self.N / len(sub) / 2

    def _lazy(self, tree, radius, m, seed):
        covered = np.zeros(self.N, dtype=bool)
        kept: list[int] = []
        X = tree.data

        def keep(i: int) -> None:
            kept.append(i)
            nb = np.asarray(tree.query_ball_point(X[i], radius), dtype=np.int64)
            ov = np.abs(np.einsum("jtc,tc->jt", self.orbits[nb, :m].conj(), self.orbits[i, :m]))
            # Bowen distance < eps  <=>  every overlap > cos(eps)
            covered[nb[np.all(ov > self.cos_eps, axis=1)]] = True

        for i in ([] if seed is None else seed):
            keep(int(i))
        for i in range(self.N):
            if not covered[i]:
                keep(i)
        return np.array(sorted(kept), dtype=np.int64)

    def _from_pairs(self, seed):
        both = np.concatenate([self.pairs, self.pairs[:, ::-1]])
        order = np.argsort(both[:, 0], kind="stable")
        nbr = both[order, 1]
        ptr = np.concatenate([[0], np.cumsum(np.bincount(both[:, 0], minlength=self.N))])
        covered = np.zeros(self.N, dtype=bool)
        kept: list[int] = []
        for i in ([] if seed is None else seed):
            kept.append(int(i))
            covered[i] = True
            covered[nbr[ptr[i]:ptr[i + 1]]] = True
        for i in range(self.N):
            if not covered[i]:
                kept.append(i)
                covered[nbr[ptr[i]:ptr[i + 1]]] = True
        return np.array(sorted(kept), dtype=np.int64)


def bowen_distance(a: np.ndarray, b: np.ndarray) -> float:
    ov = np.abs(np.sum(fs_unit(a).conj() * fs_unit(b), axis=-1))
    return float(np.max(np.arccos(np.clip(ov, 0.0, 1.0))))


def separated_sets(cloud: OrbitCloud, epsilons) -> dict[float, list[np.ndarray]]:
    """Kept index sets per eps (descending) and horizon m = 1..n.

    The set for a smaller eps is seeded with the set for the next larger
    one, so sizes never decrease as eps decreases.
    """
    emb = _embed(cloud.orbits)
    out: dict[float, list[np.ndarray]] = {}
    prev: list[np.ndarray] | None = None
    for eps in sorted(epsilons, reverse=True):
        sets = list(_Separator(cloud.orbits, emb, eps).sets(cloud.n, prev))
        out[eps] = sets
        prev = sets
    return out


def max_separated(cloud: OrbitCloud, epsilon: float) -> list[int]:
    """Greedy maximal (m, eps)-separated subset sizes for m = 1..n."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return [len(s) for s in separated_sets(cloud, [epsilon])[epsilon]]


@dataclass
class EntropyConfig:
    epsilons: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.05])
    cloud: int = 50_000
    n: int = 10
    eta: float = 1e-3
    seed: int = 0
    # inclusive horizon window [lo, hi]; None picks it from the counts
    fit_window: list[int] | None = None
    fit_start: int = 2
    plateau_fraction: float = 0.5
    saturation_fraction: float = 0.5

    @classmethod
    def from_dict(cls, d: dict) -> EntropyConfig:
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown entropy config keys: {sorted(unknown)}")
        return cls(**known)


@dataclass
class EntropyEstimate:
    epsilons: list[float]
    counts: list[list[int]]        # counts[e][m-1]
    slopes: list[float]
    windows: list[list[int]]
    slope: float
    n_range: list[int]
    cloud_size: int
    dropped: int
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m"] + [f"eps={e:g}" for e in self.epsilons])
        for m in range(len(self.counts[0])):
            w.writerow([m + 1] + [row[m] for row in self.counts])
        return buf.getvalue()


def fit_window(counts: list[int], start: int = 2, plateau_fraction: float = 0.5) -> list[int]:
    """Horizons [lo, hi] before the counts flatten out.

    hi is the last horizon whose count is at most plateau_fraction of the
    final count; the window keeps at least three horizons when it can.
    """
    n = len(counts)
    lo = min(start, n)
    hi = lo
    for m in range(lo, n + 1):
        if counts[m - 1] <= plateau_fraction * counts[-1]:
            hi = m
    hi = max(hi, min(lo + 2, n))
    return [lo, hi]


def slope_fit(counts: list[int], window: list[int]) -> float:
    lo, hi = window
    m = np.arange(lo, hi + 1, dtype=float)
    y = np.log(np.asarray(counts[lo - 1:hi], dtype=float))
    if len(m) < 2:
        return 0.0
    return float(np.polyfit(m, y, 1)[0])


def entropy_estimate(f: RationalMap, config: EntropyConfig | None = None,
                     probe: IndeterminacyProbe | None = None) -> EntropyEstimate:
    cfg = config or EntropyConfig()
    cloud = grow_cloud(f, cfg.cloud, cfg.n, cfg.eta, cfg.seed, probe)
    sets = separated_sets(cloud, cfg.epsilons)
    eps_sorted = sorted(cfg.epsilons, reverse=True)
    counts, slopes, windows, flags = [], [], [], []
    for eps in eps_sorted:
        c = [len(s) for s in sets[eps]]
        win = list(cfg.fit_window) if cfg.fit_window else \
            fit_window(c, cfg.fit_start, cfg.plateau_fraction)
        counts.append(c)
        windows.append(win)
        slopes.append(slope_fit(c, win))
        if c[win[1] - 1] >= cfg.saturation_fraction * len(cloud):
            flags.append(f"saturated at eps={eps:g}, increase cloud")
    best = int(np.argmax(slopes))
    return EntropyEstimate(epsilons=eps_sorted, counts=counts, slopes=slopes, windows=windows,
                           slope=slopes[best], n_range=windows[best], cloud_size=len(cloud),
                           dropped=cloud.dropped, flags=flags)

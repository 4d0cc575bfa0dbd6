"""Volumes of the graphs of (id, f, ..., f^{n-1}) and their growth rate lov(f).

vol(Gamma_n) expands into a sum over multi-indices (i_1..i_k) in [0, n-1]^k
of integrals of mixed wedges (f^{i_1})^*w ^ ... ^ (f^{i_k})^*w. Pointwise,
each wedge is the mixed discriminant of the pulled-back metrics H_i after
reducing them by the metric at the base point.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from .fubini import (CHUNK, STREAM_SAMPLES, ChartStep, chart_coords, cholesky_reduce,
                     fs_chunk, fs_metric, normalize_rows)
from .numeric_degrees import ChunkedMoments, mixed_discriminant_batch
from .ratmap import IndeterminacyHit, IndeterminacyProbe, ProjPoint, RationalMap

DISCARD_WARN = 0.10


@dataclass
class IterateJacobianPath:
    """Orbit data at one point: chart Jacobians of f and pulled-back metrics H_i."""

    point: ProjPoint
    orbit: list[np.ndarray]
    charts: list[int]
    jacobians: list[np.ndarray]
    pullback_metrics: list[np.ndarray]


def _paths(f: RationalMap, x: np.ndarray, n: int, probe: IndeterminacyProbe | None = None,
           eta: float | None = None):
    """Batched orbit walk; returns (H (N, n, k, k), alive, orbit, charts, jacobians)."""
    xn, a = normalize_rows(np.asarray(x, dtype=complex))
    N, k = xn.shape[0], f.dim_k
    alive = np.ones(N, dtype=bool)
    D = np.broadcast_to(np.eye(k, dtype=complex), (N, k, k)).copy()
    H = np.empty((N, n, k, k), dtype=complex)
    orbit, charts, jacs = [], [], []
    for i in range(n):
        if probe is not None and eta is not None:
            alive &= probe.min_distance(xn) >= eta
        G = fs_metric(chart_coords(xn, a))
        H[:, i] = np.conj(np.swapaxes(D, -1, -2)) @ G @ D
        orbit.append(xn)
        charts.append(a)
        if i == n - 1:
            break
        step = ChartStep(f, xn, a)
        alive &= ~step.hit
        jacs.append(step.jac)
        D = step.jac @ D
        # the image is already normalized in its own max-modulus chart
        xn, a = step.image, step.image_chart
    bad = ~np.all(np.isfinite(H.reshape(N, -1)), axis=1)
    alive &= ~bad
    H[~alive] = np.eye(k)
    return H, alive, orbit, charts, jacs


def jacobian_path(f: RationalMap, x: ProjPoint, n: int) -> IterateJacobianPath:
    """Chart Jacobians along the orbit of x and H_i = D(f^i)^H G(f^i x) D(f^i), i < n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    H, alive, orbit, charts, jacs = _paths(f, np.asarray(x.coords)[None, :], n)
    if not alive[0]:
        raise IndeterminacyHit(f"orbit of {x} fails within {n} steps")
    return IterateJacobianPath(point=x, orbit=[o[0] for o in orbit],
                               charts=[int(c[0]) for c in charts],
                               jacobians=[j[0] for j in jacs],
                               pullback_metrics=[h for h in H[0]])


def sorted_tuples(n: int, k: int):
    """Sorted multi-indices in [0, n-1]^k with their multinomial multiplicities."""
    for t in itertools.combinations_with_replacement(range(n), k):
        mult = math.factorial(k)
        for c in Counter(t).values():
            mult //= math.factorial(c)
        yield t, mult


def volume_terms(Hr: np.ndarray, n_max: int) -> np.ndarray:
    """Per-sample vol(Gamma_n) for n = 1..n_max from reduced metrics Hr (N, n_max, k, k)."""
    N, _, k, _ = Hr.shape
    inc = np.zeros((N, n_max))
    for t, mult in sorted_tuples(n_max, k):
        inc[:, t[-1]] += mult * mixed_discriminant_batch([Hr[:, i] for i in t])
    return np.cumsum(inc, axis=1)


def volume_terms_ordered(Hr: np.ndarray, n: int) -> np.ndarray:
    """vol(Gamma_n) per sample summed over all ordered tuples (reference path)."""
    k = Hr.shape[-1]
    out = np.zeros(Hr.shape[0])
    for t in itertools.product(range(n), repeat=k):
        out += mixed_discriminant_batch([Hr[:, i] for i in t])
    return out


def lower_bound_terms(Hr: np.ndarray, l: int) -> np.ndarray:
    """Per-sample density of (f^{i})^* w^l ^ w^{k-l} for every i (N, n)."""
    N, n, k, _ = Hr.shape
    eye = np.broadcast_to(np.eye(k), (N, k, k))
    return np.stack([mixed_discriminant_batch([Hr[:, i]] * l + [eye] * (k - l))
                     for i in range(n)], axis=1)


@dataclass
class GraphVolumeEstimate:
    n_values: list[int]
    volumes: list[float]
    std_errors: list[float]
    lov_fit: float
    fit_range: list[int]
    lower_bound: list[list[float]]          # [l-1][n-1]: delta_l(f^{n-1}) from the same samples
    lower_bound_ok: bool
    samples: int
    discarded: int
    seed: int
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def report(self) -> dict:
        return {"n": self.n_values, "vol": self.volumes, "lov_fit": self.lov_fit,
                "lower_bound_ok": self.lower_bound_ok}


def _reduced_chunks(f: RationalMap, n: int, samples: int, seed: int,
                    probe: IndeterminacyProbe | None, eta: float | None):
    k = f.dim_k
    for c in range(-(-samples // CHUNK)):
        x = fs_chunk(k, seed, c, STREAM_SAMPLES)[: samples - c * CHUNK]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            H, alive, *_ = _paths(f, x, n, probe, eta)
        Hr = cholesky_reduce(H, H[:, :1])
        yield Hr[alive], int(np.count_nonzero(~alive))


def fit_range(n_max: int) -> list[int]:
    """Top half of 1..n_max (inclusive)."""
    return [n_max - n_max // 2 + 1 if n_max > 1 else 1, n_max]


def lov_estimate(f: RationalMap, n_max: int = 6, samples: int = 10_000, seed: int = 0,
                 probe: IndeterminacyProbe | None = None, eta: float | None = None) -> GraphVolumeEstimate:
    """vol(Gamma_n), n = 1..n_max, from shared samples; lov = slope over the top half."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    k = f.dim_k
    vol_acc = [ChunkedMoments() for _ in range(n_max)]
    lb_acc = [[ChunkedMoments() for _ in range(n_max)] for _ in range(k)]
    gap_acc = [[ChunkedMoments() for _ in range(n_max)] for _ in range(k)]
    discarded = 0
    for Hr, dropped in _reduced_chunks(f, n_max, samples, seed, probe, eta):
        with np.errstate(over="ignore", invalid="ignore"):
            vols = volume_terms(Hr, n_max)
            lbs = [lower_bound_terms(Hr, l) for l in range(1, k + 1)]
        # overflowing paths are discarded like evaluation failures
        finite = np.all(np.isfinite(vols), axis=1)
        for lb in lbs:
            finite &= np.all(np.isfinite(lb), axis=1)
        discarded += dropped + int(np.count_nonzero(~finite))
        vols = vols[finite]
        for j in range(n_max):
            vol_acc[j].add_chunk(vols[:, j])
        for l in range(1, k + 1):
            lb = lbs[l - 1][finite]
            for j in range(n_max):
                lb_acc[l - 1][j].add_chunk(lb[:, j])
                gap_acc[l - 1][j].add_chunk(vols[:, j] - lb[:, j])
    volumes = [a.mean for a in vol_acc]
    errs = [a.std_error for a in vol_acc]
    lo, hi = fit_range(n_max)
    ns = np.arange(lo, hi + 1)
    if len(ns) >= 2 and all(v > 0 for v in volumes):
        lov = float(np.polyfit(ns, np.log(volumes[lo - 1:hi]), 1)[0])
    else:
        lov = float("nan")
    # per-sample gaps are sums of non-negative terms; allow 3 se plus roundoff
    ok = all(g.mean >= -3 * (g.std_error if g.n > 1 else 0.0) - 1e-9 * max(1.0, volumes[j])
             for row in gap_acc for j, g in enumerate(row))
    est = GraphVolumeEstimate(
        n_values=list(range(1, n_max + 1)), volumes=volumes, std_errors=errs, lov_fit=lov,
        fit_range=[lo, hi], lower_bound=[[a.mean for a in row] for row in lb_acc],
        lower_bound_ok=ok, samples=samples, discarded=discarded, seed=seed)
    if samples and discarded / samples > DISCARD_WARN:
        est.warnings.append(f"discard rate {discarded / samples:.1%} exceeds {DISCARD_WARN:.0%}: "
                            "volume near indeterminacy underexplored")
    return est


def graph_volume(f: RationalMap, n: int, samples: int = 10_000, seed: int = 0,
                 probe: IndeterminacyProbe | None = None, eta: float | None = None) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return lov_estimate(f, n, samples, seed, probe, eta).volumes[-1]

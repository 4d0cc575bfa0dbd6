"""Rational self-maps of P^k given by primitive homogeneous tuples."""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Sequence

import numpy as np

from .parse import check_homogeneous, clear_denominators, parse_rational
from .poly import HomPoly, PolyError, default_names, gcd_many, pack, unpack

log = logging.getLogger(__name__)

TAU_IND = 1e-12
DOMINANCE_TRIALS = 8


class MapError(ValueError):
    """Rejected map definition or map operation input."""


class NotDominantError(MapError):
    pass


class DegenerateComposition(MapError):
    pass


class IndeterminacyHit(ArithmeticError):
    """The point is (numerically) an indeterminacy point of the map."""


class DegreeBudgetExceeded(RuntimeError):
    def __init__(self, message: str, partial: "RationalMap", steps: int):
        super().__init__(message)
        self.partial = partial
        self.steps = steps


@dataclass(frozen=True)
class DegreeBudget:
    max_degree: int = 32768
    max_terms: int = 2_000_000


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """Homogeneous coordinates scaled so the max-modulus coordinate equals 1."""

    coords: np.ndarray
    chart: int

    @classmethod
    def from_coords(cls, coords: Sequence[complex]) -> ProjPoint:
        v = np.asarray(coords, dtype=complex).copy()
        if v.ndim != 1 or not np.any(v):
            raise ValueError("projective point needs a nonzero coordinate vector")
        a = int(np.argmax(np.abs(v)))
        v = v / v[a]
        v[a] = 1.0
        v.setflags(write=False)
        return cls(v, a)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.chart == other.chart and np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash((self.chart, self.coords.tobytes()))

    def __repr__(self) -> str:
        inner = ":".join(_fmt_complex(c) for c in self.coords)
        return f"ProjPoint({inner})"


def _fmt_complex(c: complex) -> str:
    if abs(c.imag) < 1e-14:
        return f"{c.real:.6g}"
    return f"{c.real:.6g}{c.imag:+.6g}j"


def fs_distance(p, q) -> float:
    """Fubini-Study distance arccos(|<p,q>| / |p||q|), in [0, pi/2]."""
    a = np.asarray(getattr(p, "coords", p), dtype=complex)
    b = np.asarray(getattr(q, "coords", q), dtype=complex)
    c = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.arccos(min(1.0, c)))


# ---------------------------------------------------------------------------
# batched numerical evaluation


class _Compiled:
    __slots__ = ("exps", "coeffs")

    def __init__(self, p: HomPoly):
        exps, coeffs = p.exponent_array()
        try:
            self.coeffs = np.array([complex(float(c)) for c in coeffs], dtype=complex)
        except OverflowError:
            raise MapError("coefficients too large for floating-point evaluation") from None
        self.exps = exps

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if not len(self.coeffs):
            return np.zeros(x.shape[0], dtype=complex)
        # (N, T, n) powers, product over variables, then canonical-order term sum
        mono = np.prod(x[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.coeffs

    def with_scale(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values and the term-magnitude sum sum_t |c_t| |x^t| (rounding-error scale)."""
        if not len(self.coeffs):
            z = np.zeros(x.shape[0])
            return z.astype(complex), z
        mono = np.prod(x[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.coeffs, np.abs(mono) @ np.abs(self.coeffs)


class MapEvaluator:
    """Vectorized values and homogeneous Jacobians of a rational map."""

    def __init__(self, f: RationalMap):
        n = f.dim_k + 1
        self.n = n
        self.values_c = [_Compiled(p) for p in f.components]
        self.jac_c = [[_Compiled(p.derivative(m)) for m in range(n)] for p in f.components]

    def values(self, x: np.ndarray) -> np.ndarray:
        return np.stack([c(x) for c in self.values_c], axis=1)

    def values_and_hits(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values plus a mask of rows where the image direction is undetermined.

        A row is a hit when every component is below TAU_IND relative to its
        term-magnitude scale, i.e. the values are indistinguishable from
        rounding noise (this includes exact common zeros), or non-finite.
        """
        pairs = [c.with_scale(x) for c in self.values_c]
        vals = np.stack([v for v, _ in pairs], axis=1)
        scale = np.max(np.stack([s for _, s in pairs], axis=1), axis=1)
        mag = np.max(np.abs(vals), axis=1)
        hit = ~(mag > TAU_IND * scale) | ~np.isfinite(mag) | ~(mag > 0)
        return vals, hit

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Array (N, n, n) with entry [i, m] = dF_i/dx_m."""
        return np.stack([np.stack([c(x) for c in row], axis=1) for row in self.jac_c], axis=1)


# ---------------------------------------------------------------------------
# maps


def _normalize_components(comps: Sequence[HomPoly]) -> tuple[list[HomPoly], HomPoly | None]:
    """Divide out the common factor and collective content; fix the sign."""
    nonzero = [p for p in comps if not p.is_zero()]
    if not nonzero:
        raise DegenerateComposition("all components vanish identically")
    g = gcd_many(nonzero)
    cancelled = None
    if g.degree > 0:
        cancelled = g
        if g.is_monomial():
            exps = unpack(next(iter(g.raw_terms())), g.nvars)
            comps = [p.divide_monomial(exps) if not p.is_zero() else
                     HomPoly.zero(p.nvars, p.degree - g.degree) for p in comps]
        else:
            comps = [p.divmod_exact(g) if not p.is_zero() else
                     HomPoly.zero(p.nvars, p.degree - g.degree) for p in comps]
    cont = reduce(math.gcd, (p.content() for p in comps if not p.is_zero()))
    first = next(p for p in comps if not p.is_zero())
    if first.leading_coeff() < 0:
        cont = -cont
    if cont != 1:
        comps = [p.exact_div_int(cont) for p in comps]
    degree = next(p.degree for p in comps if not p.is_zero())
    comps = [p if not p.is_zero() else HomPoly.zero(p.nvars, degree) for p in comps]
    return list(comps), cancelled


class RationalMap:
    """Dominant rational self-map of P^k as k+1 primitive homogeneous components.

    Construction reduces the tuple (common factor and content removed, first
    nonzero component with positive leading coefficient), so two maps are
    equal as projective maps exactly when their components are equal.
    """

    def __init__(self, components: Sequence[HomPoly], name: str | None = None,
                 variables: Sequence[str] | None = None, *, check_dominant: bool = True,
                 reduce_map: bool = True):
        comps = list(components)
        if len(comps) < 2:
            raise MapError("a self-map of P^k needs k+1 >= 2 components")
        n = len(comps)
        if any(p.nvars != n for p in comps):
            raise MapError(f"components must be polynomials in {n} variables")
        degrees = {p.degree for p in comps if not p.is_zero()}
        if len(degrees) > 1:
            raise MapError(f"components have unequal degrees {sorted(degrees)}")
        self.cancelled: HomPoly | None = None
        if reduce_map:
            comps, self.cancelled = _normalize_components(comps)
        self.components: tuple[HomPoly, ...] = tuple(comps)
        self.dim_k = n - 1
        self.degree = next(p.degree for p in comps if not p.is_zero())
        if self.degree < 1:
            raise MapError("map degree must be at least 1")
        self.name = name
        self.variables = list(variables) if variables is not None else default_names(n)
        self._evaluator: MapEvaluator | None = None
        if check_dominant and not self.is_dominant():
            raise NotDominantError(
                f"map {name or self} is not dominant (Jacobian rank < {self.dim_k} "
                f"at {DOMINANCE_TRIALS} random points)")

    # -- basics -----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return self.dim_k + 1

    @property
    def evaluator(self) -> MapEvaluator:
        if self._evaluator is None:
            self._evaluator = MapEvaluator(self)
        return self._evaluator

    def term_count(self) -> int:
        return sum(len(p) for p in self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __str__(self) -> str:
        return "(" + " : ".join(p.to_string(self.variables) for p in self.components) + ")"

    def __repr__(self) -> str:
        label = f"{self.name}: " if self.name else ""
        return f"RationalMap({label}{self}, k={self.dim_k}, degree={self.degree})"

    def to_document(self) -> dict:
        return {"space": f"P{self.dim_k}", "variables": list(self.variables),
                "components": [p.to_string(self.variables) for p in self.components],
                "name": self.name}

    def with_name(self, name: str | None) -> RationalMap:
        out = object.__new__(RationalMap)
        out.__dict__.update(self.__dict__)
        out.name = name
        return out

    @classmethod
    def identity(cls, k: int) -> RationalMap:
        return cls([HomPoly.variable(k + 1, j) for j in range(k + 1)], name="identity")

    @classmethod
    def linear(cls, matrix, name: str | None = None) -> RationalMap:
        """Projective linear map x -> M x for an integer matrix M."""
        m = [[int(v) for v in row] for row in matrix]
        n = len(m)
        comps = [HomPoly.from_terms(n, {tuple(int(i == j) for i in range(n)): m[r][j]
                                        for j in range(n)}, degree=1) for r in range(n)]
        return cls(comps, name=name)

    def is_identity(self) -> bool:
        if self.degree != 1:
            return False
        n = self.nvars
        c0 = None
        for i, p in enumerate(self.components):
            t = p.raw_terms()
            if len(t) != 1:
                return False
            (k, c), = t.items()
            if k != pack(tuple(int(j == i) for j in range(n))):
                return False
            if c0 is None:
                c0 = c
            elif c != c0:
                return False
        return True

    def is_dominant(self, trials: int = DOMINANCE_TRIALS, seed: int = 20240611) -> bool:
        """Numerical rank test of the cone Jacobian at random points."""
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(trials, self.nvars)) + 1j * rng.normal(size=(trials, self.nvars))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        jac = self.evaluator.jacobian(x)
        s = np.linalg.svd(jac, compute_uv=False)
        ok = s[:, -1] > 1e-9 * np.maximum(s[:, 0], 1e-300)
        return bool(np.any(ok))

    # -- evaluation -------------------------------------------------------

    def __call__(self, x: ProjPoint) -> ProjPoint:
        return evaluate(self, x)


# ---------------------------------------------------------------------------
# operations


def compose(f: RationalMap, g: RationalMap, name: str | None = None) -> RationalMap:
    """Reduced map f o g (substitute g into f, then cancel the common factor)."""
    if f.dim_k != g.dim_k:
        raise MapError(f"dimension mismatch: P{f.dim_k} vs P{g.dim_k}")
    from .poly import substitute_many
    raw = substitute_many(list(f.components), list(g.components))
    if all(p.is_zero() for p in raw):
        raise DegenerateComposition(
            "composition vanishes identically (g maps into the indeterminacy locus of f)")
    return RationalMap(raw, name=name, variables=f.variables, check_dominant=False)


def iterate(f: RationalMap, n: int, budget: DegreeBudget | None = None) -> RationalMap:
    """Reduced n-th iterate; raises DegreeBudgetExceeded with the last good iterate."""
    if n < 1:
        raise MapError("iterate needs n >= 1")
    it = _iterates(f, n, budget or DegreeBudget())
    last = None
    for _, last in it:
        pass
    return last


def _iterates(f: RationalMap, n: int, budget: DegreeBudget):
    current = f
    yield 1, f
    for i in range(2, n + 1):
        if f.degree * current.degree > 2 * budget.max_degree:
            raise DegreeBudgetExceeded(
                f"iterate {i}: raw degree {f.degree * current.degree} exceeds twice the "
                f"budget {budget.max_degree}", current, i - 1)
        nxt = compose(f, current)
        if nxt.degree > budget.max_degree or nxt.term_count() > budget.max_terms:
            raise DegreeBudgetExceeded(
                f"iterate {i}: degree {nxt.degree}, {nxt.term_count()} terms exceed budget "
                f"({budget.max_degree}, {budget.max_terms})", current, i - 1)
        current = nxt
        yield i, current


@dataclass
class DegreeSequence:
    """values[n] = algebraic degree of the reduced n-th iterate, values[0] = 1."""

    values: list[int]
    horizon: int
    truncated: bool = False
    diagnostic: str | None = None

    @property
    def computed(self) -> int:
        return len(self.values) - 1

    def fekete_roots(self) -> list[float]:
        return [v ** (1.0 / n) for n, v in enumerate(self.values) if n >= 1]

    def running_inf(self) -> list[float]:
        out, best = [], math.inf
        for r in self.fekete_roots():
            best = min(best, r)
            out.append(best)
        return out

    def ratios(self) -> list[float]:
        return [self.values[n] / self.values[n - 1] for n in range(1, len(self.values))]

    def to_dict(self) -> dict:
        return {"values": list(self.values), "horizon": self.horizon,
                "truncated": self.truncated, "diagnostic": self.diagnostic}


def degree_sequence(f: RationalMap, N: int, budget: DegreeBudget | None = None,
                    keep_iterates: bool = False):
    """Exact degrees of iterates 0..N. With keep_iterates, also return the iterates."""
    if N < 1:
        raise MapError("degree_sequence needs N >= 1")
    values = [1]
    iterates = []
    truncated, diag = False, None
    try:
        for _, g in _iterates(f, N, budget or DegreeBudget()):
            values.append(g.degree)
            if keep_iterates:
                iterates.append(g)
    except DegreeBudgetExceeded as exc:
        truncated, diag = True, str(exc)
        log.warning("degree sequence of %s truncated: %s", f.name or f, exc)
    seq = DegreeSequence(values, N, truncated, diag)
    return (seq, iterates) if keep_iterates else seq


def evaluate(f: RationalMap, x: ProjPoint) -> ProjPoint:
    """Image of a point off the indeterminacy set, renormalized."""
    if len(x.coords) != f.nvars:
        raise MapError("point dimension does not match map")
    vals, hit = f.evaluator.values_and_hits(np.asarray(x.coords, dtype=complex)[None, :])
    if hit[0]:
        raise IndeterminacyHit(f"all components below {TAU_IND} (relative) at {x!r}")
    return ProjPoint.from_coords(vals[0])


def conjugate(f: RationalMap, g: RationalMap, g_inv: RationalMap) -> RationalMap:
    """Reduced g o f o g_inv, after checking g o g_inv is the identity."""
    if not compose(g, g_inv).is_identity():
        raise MapError("g_inv is not an inverse of g")
    return compose(g, compose(f, g_inv))


def _int_det(m: list[list[int]]) -> int:
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _int_det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(len(m)))


def adjugate(matrix) -> list[list[int]]:
    m = [[int(v) for v in row] for row in matrix]
    n = len(m)
    if n == 1:
        return [[1]]
    cof = [[(-1) ** (i + j) * _int_det([r[:j] + r[j + 1:] for k, r in enumerate(m) if k != i])
            for j in range(n)] for i in range(n)]
    return [[cof[j][i] for j in range(n)] for i in range(n)]


def linear_inverse(matrix) -> RationalMap:
    """Projective inverse of x -> Mx: the adjugate, which stays integral."""
    if _int_det([[int(v) for v in row] for row in matrix]) == 0:
        raise MapError("singular matrix has no inverse")
    return RationalMap.linear(adjugate(matrix))


def random_map(k: int, degree: int, rng: np.random.Generator, coeff_bound: int = 3,
               density: float = 0.6, max_tries: int = 100) -> RationalMap:
    """Random dominant map with small integer coefficients."""
    n = k + 1
    monos = [e for e in _monomials(n, degree)]
    for _ in range(max_tries):
        comps = []
        for _ in range(n):
            terms = {}
            for e in monos:
                if rng.random() < density:
                    terms[e] = int(rng.integers(-coeff_bound, coeff_bound + 1))
            comps.append(HomPoly.from_terms(n, terms, degree=degree))
        if any(p.is_zero() for p in comps):
            continue
        try:
            f = RationalMap(comps)
        except MapError:
            continue
        return f
    raise MapError("could not draw a dominant random map")


def _monomials(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in _monomials(n - 1, d - a):
            yield (a,) + rest


# ---------------------------------------------------------------------------
# indeterminacy


@dataclass
class IndeterminacyProbe:
    """Numerically located common zeros of all components.

    Heuristic, not exhaustive: exact coordinate base points plus whatever a
    multistart Gauss-Newton search converged to.
    """

    points: list[ProjPoint] = field(default_factory=list)
    exact: list[bool] = field(default_factory=list)
    heuristic: bool = True

    def __len__(self) -> int:
        return len(self.points)

    def min_distance(self, x: np.ndarray) -> np.ndarray:
        """FS distance from each row of x (N, k+1) to the nearest probe point."""
        if not self.points:
            return np.full(x.shape[0], np.inf)
        u = x / np.linalg.norm(x, axis=-1, keepdims=True)
        P = np.stack([p.coords / np.linalg.norm(p.coords) for p in self.points])
        ov = np.abs(u.conj() @ P.T)
        return np.arccos(np.clip(ov.max(axis=1), 0.0, 1.0))

    def to_dict(self) -> dict:
        return {"heuristic": self.heuristic,
                "points": [[[float(c.real), float(c.imag)] for c in p.coords] for p in self.points],
                "exact": list(self.exact)}


def indeterminacy_probe(f: RationalMap, samples: int = 64, seed: int = 0,
                        iterations: int = 200) -> IndeterminacyProbe:
    n = f.nvars
    probe = IndeterminacyProbe()

    def add(point: ProjPoint, exact: bool) -> None:
        for q in probe.points:
            if fs_distance(q, point) < 1e-4:
                return
        probe.points.append(point)
        probe.exact.append(exact)

    for j in range(n):
        e = tuple(int(i == j) * f.degree for i in range(n))
        key = pack(e)
        if all(p.raw_terms().get(key, 0) == 0 for p in f.components):
            add(ProjPoint.from_coords([float(i == j) for i in range(n)]), True)

    if samples <= 0:
        return probe
    ev = f.evaluator
    scale = max(max(abs(c) for c in p.raw_terms().values()) for p in f.components
                if not p.is_zero())
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    rows = np.arange(samples)
    for _ in range(iterations):
        a = np.argmax(np.abs(x), axis=1)
        x = x / x[rows, a][:, None]
        with np.errstate(all="ignore"):
            vals = ev.values(x) / scale
            jac = ev.jacobian(x) / scale
        jac = np.nan_to_num(jac, nan=0.0, posinf=0.0, neginf=0.0)
        vals = np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)
        # chart coordinates: every variable except the max-modulus one
        keep = np.ones((samples, n), dtype=bool)
        keep[rows, a] = False
        J = jac.transpose(0, 2, 1)[keep].reshape(samples, n - 1, n).transpose(0, 2, 1)
        step = -np.einsum("sij,sj->si", np.linalg.pinv(J, rcond=1e-13), vals)
        # damp long steps; rows that blew up are parked at a harmless point
        size = np.linalg.norm(step, axis=1, keepdims=True)
        step = np.where(size > 1.0, step / np.maximum(size, 1e-300), step)
        full = np.zeros((samples, n), dtype=complex)
        full[keep] = step.reshape(-1)
        x = x + full
        broken = ~np.all(np.isfinite(x), axis=1)
        x[broken] = 1.0
    a = np.argmax(np.abs(x), axis=1)
    x = x / x[rows, a][:, None]
    resid = np.max(np.abs(ev.values(x)), axis=1) / scale
    order = np.argsort(resid, kind="stable")
    for i in order:
        if resid[i] < 1e-10:
            add(ProjPoint.from_coords(np.round(x[i], 12)), False)
    return probe


# ---------------------------------------------------------------------------
# map documents


def map_from_document(doc: dict, *, check_dominant: bool = True) -> RationalMap:
    """Build a map from the JSON document form (components or monomial_matrix)."""
    if not isinstance(doc, dict):
        raise MapError("map document must be a JSON object")
    space = doc.get("space")
    k = _parse_space(space)
    name = doc.get("name")
    if "monomial_matrix" in doc:
        from .monomial import MonomialMap, homogenize
        A = doc["monomial_matrix"]
        if len(A) != k or any(len(row) != k for row in A):
            raise MapError(f"monomial_matrix must be {k}x{k} for space {space}")
        return homogenize(MonomialMap(A)).with_name(name)
    variables = doc.get("variables") or default_names(k + 1)
    if len(variables) != k + 1:
        raise MapError(f"space {space} needs {k + 1} variables, got {len(variables)}")
    comps_text = doc.get("components")
    if not isinstance(comps_text, list) or len(comps_text) != k + 1:
        raise MapError(f"space {space} needs {k + 1} components")
    parsed = [parse_rational(str(t), variables) for t in comps_text]
    degrees = {check_homogeneous(p, variables, str(t)) for p, t in zip(parsed, comps_text)}
    if len(degrees) > 1:
        raise MapError(f"components have unequal degrees {sorted(degrees)}")
    ints = clear_denominators(parsed)
    (d,) = degrees
    comps = [HomPoly(k + 1, d, {pack(e): c for e, c in p.items()}) for p in ints]
    f = RationalMap(comps, name=name, variables=variables, check_dominant=check_dominant)
    if f.cancelled is not None:
        warnings.warn(f"map {name!r}: cancelled common factor {f.cancelled.to_string(variables)}",
                      stacklevel=2)
    return f


def _parse_space(space) -> int:
    if not isinstance(space, str) or not space.upper().startswith("P"):
        raise MapError(f"space must look like 'P2', got {space!r}")
    try:
        k = int(space[1:])
    except ValueError:
        raise MapError(f"space must look like 'P2', got {space!r}") from None
    if k < 1:
        raise MapError("space dimension must be at least 1")
    return k


def load_map(path: str | Path) -> RationalMap:
    """Load a map document from a JSON file; JSON syntax errors carry line/column."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return map_from_document(doc)
    except PolyError as exc:
        raise MapError(f"{path}: {exc}") from None

"""Verification suites: entropy/lov/dynamical-degree consistency, submultiplicativity,
Fekete subadditivity and birational invariance, with recorded verdicts.

Every verdict stores both sides of its inequality and the tolerance used.
A check whose ingredients carried a warning is reported "inconclusive",
never "pass".
"""

from __future__ import annotations

import copy
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .entropy import EntropyConfig, EntropyEstimate, entropy_estimate
from .graphvol import GraphVolumeEstimate, lov_estimate
from .monomial import MonomialMap, exact_dynamical_degrees
from .numeric_degrees import DegreeEstimate, delta_l_estimate, topological_degree_estimate
from .ratmap import (DegreeBudget, DegreeSequence, MapError, RationalMap, compose, conjugate,
                     degree_sequence, indeterminacy_probe, iterate, map_from_document,
                     random_map)

log = logging.getLogger(__name__)

PASS, FAIL, INCONCLUSIVE, UNVERIFIABLE = "pass", "fail", "inconclusive", "unverifiable"

DEFAULTS: dict = {
    "seed": 20240611,
    "degree_N": 8,
    "degree_budget": {"max_degree": 32768, "max_terms": 2_000_000},
    "dyndeg_samples": 100_000,
    "entropy": {},
    "lov": {"samples": 10_000, "n_max": {"1": 8, "2": 6, "3": 12}},
    "tolerances": {"entropy_vs_lambda": 0.1, "lov_vs_lambda": 0.15, "entropy_vs_lov": 0.15},
    "birational_N": 6,
    "submultiplicativity_trials": 200,
}


def merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; override wins on leaves."""
    out = copy.deepcopy(base)
    for key, val in (override or {}).items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass
class Verdict:
    check: str
    status: str
    lhs: float | None
    rhs: float | None
    tolerance: float
    note: str = ""

    @classmethod
    def inequality(cls, check: str, lhs: float, rhs: float, tolerance: float,
                   warnings: list[str] | None = None, relation: str = "<=") -> Verdict:
        """lhs <= rhs + tol (relation '<=') or |lhs - rhs| <= tol (relation '~')."""
        if lhs is None or rhs is None or not (math.isfinite(lhs) and math.isfinite(rhs)):
            return cls(check, INCONCLUSIVE, lhs, rhs, tolerance, "missing or non-finite value")
        ok = abs(lhs - rhs) <= tolerance if relation == "~" else lhs <= rhs + tolerance
        if warnings:
            return cls(check, INCONCLUSIVE, lhs, rhs, tolerance, "; ".join(warnings))
        return cls(check, PASS if ok else FAIL, lhs, rhs, tolerance)


@dataclass
class LambdaEstimate:
    l: int
    value: float | None
    method: str
    last_ratio: float | None = None
    fekete: float | None = None
    warnings: list[str] = field(default_factory=list)


@dataclass
class InvariantReport:
    map_name: str
    space: str
    degree_seq: DegreeSequence
    lambda_estimates: list[LambdaEstimate]
    degree_estimates: list[DegreeEstimate]
    entropy: EntropyEstimate | None
    lov: GraphVolumeEstimate | None
    verdicts: list[Verdict]

    def to_dict(self) -> dict:
        return {
            "map_name": self.map_name,
            "space": self.space,
            "degree_seq": self.degree_seq.to_dict(),
            "lambda_estimates": [asdict(x) for x in self.lambda_estimates],
            "degree_estimates": [d.to_dict() for d in self.degree_estimates],
            "entropy": self.entropy.to_dict() if self.entropy else None,
            "lov": self.lov.to_dict() if self.lov else None,
            "verdicts": [asdict(v) for v in self.verdicts],
        }


# ---------------------------------------------------------------------------
# dynamical degrees


def lambda_estimates(f: RationalMap, seq: DegreeSequence, top: DegreeEstimate | None,
                     monomial: MonomialMap | None = None) -> list[LambdaEstimate]:
    """lambda_l per l: monomial oracle when available, else Fekete (l=1) and d_t (l=k)."""
    k = f.dim_k
    if monomial is not None:
        return [LambdaEstimate(l, v, "monomial oracle")
                for l, v in enumerate(exact_dynamical_degrees(monomial), start=1)]
    warn = [f"degree sequence truncated: {seq.diagnostic}"] if seq.truncated else []
    inf = seq.running_inf()
    out = [LambdaEstimate(1, inf[-1] if inf else None, "fekete inf",
                          last_ratio=seq.ratios()[-1] if seq.computed else None,
                          fekete=inf[-1] if inf else None, warnings=warn)]
    for l in range(2, k + 1):
        if l == k and top is not None:
            out.append(LambdaEstimate(l, float(top.rounded), "topological degree (rounded delta_k)",
                                      warnings=list(top.warnings)))
        else:
            out.append(LambdaEstimate(l, None, "unverifiable: no oracle for this order"))
    return out


def max_log_lambda(lams: list[LambdaEstimate]) -> tuple[float | None, list[str], bool]:
    """(max log lambda over known l, warnings, complete?)."""
    known = [x for x in lams if x.value is not None]
    if not known:
        return None, ["no lambda estimates"], False
    warnings = [w for x in known for w in x.warnings]
    return max(math.log(x.value) for x in known), warnings, len(known) == len(lams)


# ---------------------------------------------------------------------------
# checks


def check_growth_bounds(entropy: EntropyEstimate, lov: GraphVolumeEstimate,
                   lams: list[LambdaEstimate], tolerances: dict) -> list[Verdict]:
    """(a) h <= max log lambda + t_a; (b) |lov - max log lambda| <= t_b; (c) h <= lov + t_c."""
    rhs, lam_warn, complete = max_log_lambda(lams)
    ent_warn = entropy_warnings(entropy)
    lov_warn = list(lov.warnings) + ([] if lov.lower_bound_ok else ["lower bound check failed"])
    t_a, t_b, t_c = (tolerances["entropy_vs_lambda"], tolerances["lov_vs_lambda"],
                     tolerances["entropy_vs_lov"])
    a = Verdict.inequality("entropy <= max log lambda", entropy.slope, rhs, t_a, ent_warn + lam_warn)
    if complete:
        b = Verdict.inequality("lov == max log lambda", lov.lov_fit, rhs, t_b, lov_warn + lam_warn,
                               relation="~")
    else:
        b = Verdict("lov == max log lambda", UNVERIFIABLE, lov.lov_fit, rhs, t_b,
                    "some lambda_l has no oracle or stable extrapolation")
    if not complete and a.status == FAIL:
        # the known lambdas only bound the maximum from below
        a.status, a.note = INCONCLUSIVE, "rhs incomplete (some lambda_l unknown)"
    c = Verdict.inequality("entropy <= lov", entropy.slope, lov.lov_fit, t_c, ent_warn + lov_warn)
    return [a, b, c]


def entropy_warnings(e: EntropyEstimate) -> list[str]:
    """Flags attached to the scale that produced the headline."""
    best = e.epsilons[int(np.argmax(e.slopes))]
    return [fl for fl in e.flags if f"eps={best:g}," in fl]


def check_submultiplicativity(f: RationalMap | None = None, g: RationalMap | None = None,
                              trials: int = 200, seed: int = 0, k: int = 2,
                              max_degree: int = 3) -> Verdict:
    """deg(f o g) <= deg f * deg g for the given pair and `trials` random pairs."""
    rng = np.random.default_rng(seed)
    pairs = [(f, g)] if f is not None and g is not None else []
    for _ in range(trials):
        d1, d2 = rng.integers(1, max_degree + 1, size=2)
        pairs.append((random_map(k, int(d1), rng), random_map(k, int(d2), rng)))
    worst, violations = -math.inf, 0
    for a, b in pairs:
        lhs, rhs = compose(a, b).degree, a.degree * b.degree
        violations += lhs > rhs
        worst = max(worst, lhs - rhs)
    v = Verdict("deg(f o g) <= deg f deg g", PASS if violations == 0 else FAIL,
                float(worst), 0.0, 0.0, f"{len(pairs)} pairs, {violations} violations; "
                "lhs/rhs = max over pairs of deg(f o g) - deg f deg g vs 0")
    return v


def check_fekete(seq: DegreeSequence, N: int | None = None) -> Verdict:
    """values[m+n] <= values[m] values[n] for m+n <= N, and a non-increasing running inf."""
    vals = seq.values
    N = seq.computed if N is None else min(N, seq.computed)
    if N < 4:
        return Verdict("fekete subadditivity", INCONCLUSIVE, None, None, 0.0,
                       f"only {seq.computed} degrees computed (need N >= 4)")
    worst = -math.inf
    bad = 0
    for m in range(1, N):
        for n in range(1, N - m + 1):
            gap = math.log(vals[m + n]) - math.log(vals[m]) - math.log(vals[n])
            worst = max(worst, gap)
            bad += vals[m + n] > vals[m] * vals[n]
    inf = seq.running_inf()[:N]
    mono = all(b <= a for a, b in zip(inf, inf[1:]))
    ok = bad == 0 and mono
    warn = [f"degree sequence truncated: {seq.diagnostic}"] if seq.truncated else []
    return Verdict("fekete subadditivity", (INCONCLUSIVE if warn and not ok else
                                            PASS if ok else FAIL),
                   worst, 0.0, 0.0, f"N={N}; lhs = max log(d_(m+n) / (d_m d_n))"
                   + ("" if mono else "; running inf increased"))


def check_birational_invariance(f: RationalMap, g: RationalMap, g_inv: RationalMap, N: int = 6,
                                budget: DegreeBudget | None = None) -> Verdict:
    """|(1/n)(log deg h^n - log deg f^n)| <= (2/n) log(deg g deg g_inv) for n <= N, h = g f g^-1."""
    if not compose(g, g_inv).is_identity():
        raise MapError("g_inv is not an inverse of g")
    c = math.log(g.degree * g_inv.degree)
    worst_excess = -math.inf
    lhs_at, rhs_at = None, None
    for n in range(1, N + 1):
        fn = iterate(f, n, budget)
        hn = conjugate(fn, g, g_inv)
        lhs = abs(math.log(hn.degree) - math.log(fn.degree)) / n
        rhs = 2.0 * c / n + 1e-9
        if lhs - rhs > worst_excess:
            worst_excess, lhs_at, rhs_at = lhs - rhs, lhs, rhs
    return Verdict("birational invariance", PASS if worst_excess <= 0 else FAIL,
                   lhs_at, rhs_at, 0.0, f"N={N}; worst n shown")


# ---------------------------------------------------------------------------
# per-map and corpus runs


def _n_max(cfg: dict, k: int) -> int:
    n_max = cfg["lov"]["n_max"]
    return int(n_max[str(k)] if isinstance(n_max, dict) else n_max)


def map_report(doc: dict, config: dict | None = None) -> InvariantReport:
    """Full invariant report for one map document (with optional per-map overrides)."""
    cfg = merge(merge(DEFAULTS, config or {}), doc.get("config", {}))
    f = map_from_document({k: v for k, v in doc.items() if k != "config"})
    name = doc.get("name") or str(f)
    k = f.dim_k
    seed = int(cfg["seed"])
    budget = DegreeBudget(**cfg["degree_budget"])
    log.info("map %s: degree sequence", name)
    seq = degree_sequence(f, int(cfg["degree_N"]), budget)
    log.info("map %s: dynamical degree estimates", name)
    S = int(cfg["dyndeg_samples"])
    ests = [delta_l_estimate(f, l, S, seed) for l in range(1, k)]
    top = topological_degree_estimate(f, S, seed)
    ests.append(top)
    monomial = MonomialMap(doc["monomial_matrix"]) if "monomial_matrix" in doc else None
    lams = lambda_estimates(f, seq, top, monomial)
    probe = indeterminacy_probe(f, seed=seed)
    log.info("map %s: entropy", name)
    ecfg = EntropyConfig.from_dict(merge({"seed": seed}, cfg["entropy"]))
    ent = entropy_estimate(f, ecfg, probe)
    log.info("map %s: graph volumes", name)
    lov = lov_estimate(f, _n_max(cfg, k), int(cfg["lov"]["samples"]), seed)
    verdicts = check_growth_bounds(ent, lov, lams, cfg["tolerances"])
    verdicts.append(check_fekete(seq, int(cfg["degree_N"])))
    return InvariantReport(name, f"P{k}", seq, lams, ests, ent, lov, verdicts)


def load_corpus(path: str | Path | None = None) -> dict:
    if path is None:
        text = resources.files("ratdyn").joinpath("data/corpus.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def run_corpus(corpus: dict | None = None, config: dict | None = None,
               only: list[str] | None = None) -> dict:
    """Reports for every corpus map plus corpus-level checks, as a JSON-ready dict."""
    corpus = corpus if corpus is not None else load_corpus()
    cfg = merge(merge(DEFAULTS, corpus.get("defaults", {})), config or {})
    docs = {d["name"]: d for d in corpus["maps"]}
    names = only or list(docs)
    reports = [map_report(docs[n], cfg).to_dict() for n in names]
    seed = int(cfg["seed"])
    extra = [asdict(check_submultiplicativity(trials=int(cfg["submultiplicativity_trials"]),
                                              seed=seed))]
    for item in corpus.get("birational", []):
        if only and item["map"] not in only:
            continue
        f = map_from_document(_strip(docs[item["map"]]))
        g = map_from_document(item["conjugator"])
        g_inv = map_from_document(item["inverse"])
        v = check_birational_invariance(f, g, g_inv, int(cfg["birational_N"]))
        v.note = f"f={item['map']}, g={item['conjugator'].get('name')}; " + v.note
        extra.append(asdict(v))
    return {"seed": seed, "config": cfg, "maps": reports, "corpus_checks": extra}


def _strip(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "config"}


def verdict_summary(result: dict) -> list[tuple[str, str, str]]:
    rows = []
    for rep in result["maps"]:
        for v in rep["verdicts"]:
            rows.append((rep["map_name"], v["check"], v["status"]))
    for v in result["corpus_checks"]:
        rows.append(("corpus", v["check"], v["status"]))
    return rows


def _clean(obj):
    """Replace non-finite floats by None so reports are strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    """Canonical JSON (sorted keys, fixed separators) for byte-identical reports."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"

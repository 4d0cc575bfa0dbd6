"""Acceptance criteria AC1-AC8; each test prints one PASS/FAIL line.

Tolerances and runtime limits are pinned here:
AC1 ratio within 5%, < 10 s; AC3 3 standard errors at 1e5 samples, < 60 s;
AC4 1e-10 on 1000 instances; AC5 headline in [0.60, 0.75] and <= 0.05, < 120 s;
AC6 entropy tolerance 0.1, lov tolerance 0.15, P^1 volumes within 3 standard errors.
"""

import math
import time

import numpy as np
import pytest

from test_numeric_degrees import random_hermitian, random_psd, wedge_top_coefficient
from ratdyn.entropy import EntropyConfig, entropy_estimate
from ratdyn.fubini import elementary_symmetric, pencil_eigenvalues
from ratdyn.harness import (check_birational_invariance, check_submultiplicativity, dumps,
                            load_corpus, run_corpus)
from ratdyn.monomial import MonomialMap, homogenize
from ratdyn.numeric_degrees import delta_l_estimate, mixed_wedge_coefficient
from ratdyn.ratmap import degree_sequence, map_from_document

SEED = 20240611
GOLDEN_SQ = (3 + math.sqrt(5)) / 2


@pytest.fixture
def report(pytestconfig):
    """report(tag, ok, detail) prints one uncaptured line, then asserts."""
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")

    def _report(tag: str, ok: bool, detail: str) -> None:
        with capman.global_and_fixture_disabled():
            print(f"\n{tag} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return _report


def _docs():
    return {d["name"]: {k: v for k, v in d.items() if k != "config"}
            for d in load_corpus()["maps"]}


@pytest.fixture(scope="session")
def corpus_run():
    t0 = time.perf_counter()
    result = run_corpus()
    return result, dumps(result), time.perf_counter() - t0


def test_ac1_symbolic_degree_sequences(report):
    t0 = time.perf_counter()
    docs = _docs()
    sigma = degree_sequence(map_from_document(docs["cremona"]), 6).values
    squares = degree_sequence(map_from_document(docs["squares"]), 6).values
    fib = degree_sequence(homogenize(MonomialMap([[2, 1], [1, 1]])), 10).values
    elapsed = time.perf_counter() - t0
    ratio = fib[10] / fib[9]
    ok = (sigma == [1, 2, 1, 2, 1, 2, 1] and squares == [1, 2, 4, 8, 16, 32, 64]
          and abs(ratio - GOLDEN_SQ) / GOLDEN_SQ <= 0.05 and elapsed < 10)
    report("AC1", ok, f"sigma {sigma}, squares {squares}, fib ratio {ratio:.6f} "
                      f"(target {GOLDEN_SQ:.4f}), {elapsed:.2f} s")


def test_ac2_submultiplicativity(report):
    v = check_submultiplicativity(trials=200, seed=SEED, k=2, max_degree=3)
    report("AC2", v.status == "pass", v.note)


def test_ac3_monte_carlo_degrees(report):
    t0 = time.perf_counter()
    lines, ok = [], True
    maps = {name: map_from_document(doc) for name, doc in _docs().items()}
    for name, f in maps.items():
        est = delta_l_estimate(f, 1, 100_000, SEED)
        good = abs(est.mean - f.degree) <= 3 * est.std_error + 1e-12
        ok &= good
        lines.append(f"{name} {est.mean:.3f}+-{est.std_error:.3f}/{f.degree}")
    for name, target in (("squares", 4), ("cremona", 1)):
        est = delta_l_estimate(maps[name], 2, 100_000, SEED)
        ok &= abs(est.mean - target) <= 3 * est.std_error
        lines.append(f"{name} d2 {est.mean:.3f}+-{est.std_error:.3f}/{target}")
    elapsed = time.perf_counter() - t0
    ok &= len(maps) >= 10 and elapsed < 60
    report("AC3", ok, f"{'; '.join(lines)}; {elapsed:.1f} s")


def test_ac4_wedge_identities(report):
    worst_density = worst_md = 0.0
    for k in (2, 3):
        rng = np.random.default_rng(100 + k)
        eye = np.eye(k)
        for _ in range(1000):
            P = random_psd(rng, k, rank=int(rng.integers(1, k + 1)))
            G = random_psd(rng, k) + 0.1 * eye
            nu = pencil_eigenvalues(P[None], G[None])[0]
            vol = wedge_top_coefficient([G] * k)
            for l in range(1, k + 1):
                ref = wedge_top_coefficient([P] * l + [G] * (k - l)) / vol
                got = elementary_symmetric(nu, l) / math.comb(k, l)
                worst_density = max(worst_density, abs(got - ref) / max(1.0, abs(ref)))
            H = [random_hermitian(rng, k) for _ in range(k)]
            K = random_hermitian(rng, k)
            a, b = rng.standard_normal(2)
            d = mixed_wedge_coefficient(H)
            lin = mixed_wedge_coefficient([a * H[0] + b * K] + H[1:])
            errs = [d - mixed_wedge_coefficient(H[::-1]),
                    lin - a * d - b * mixed_wedge_coefficient([K] + H[1:]),
                    mixed_wedge_coefficient([eye] * k) - 1.0,
                    mixed_wedge_coefficient([H[0]] * k) - np.linalg.det(H[0]).real]
            worst_md = max(worst_md, max(abs(e) for e in errs) / max(1.0, abs(d), abs(lin)))
    ok = worst_density < 1e-10 and worst_md < 1e-10
    report("AC4", ok, f"max density error {worst_density:.2e}, "
                      f"max mixed-discriminant error {worst_md:.2e}")


def test_ac5_entropy(report):
    docs = _docs()
    t0 = time.perf_counter()
    h = {name: entropy_estimate(map_from_document(docs[name]), EntropyConfig()).slope
         for name in ("z_squared", "identity", "cremona")}
    elapsed = time.perf_counter() - t0
    ok = (0.60 <= h["z_squared"] <= 0.75 and h["identity"] <= 0.05 and h["cremona"] <= 0.05
          and elapsed < 120)
    report("AC5", ok, ", ".join(f"{k} {v:.4f}" for k, v in h.items()) + f"; {elapsed:.1f} s")


def test_ac6_growth_bounds(report, corpus_run):
    result, _, _ = corpus_run
    entropy_fail, lov_bad, notes = [], [], []
    monomial = {d["name"] for d in load_corpus()["maps"] if "monomial_matrix" in d}
    for rep in result["maps"]:
        v = {x["check"]: x for x in rep["verdicts"]}
        a = v["entropy <= max log lambda"]
        if a["status"] == "fail":
            entropy_fail.append(rep["map_name"])
        if rep["map_name"] in monomial:
            b = v["lov == max log lambda"]
            notes.append(f"{rep['map_name']} lov {b['lhs']:.3f} vs {b['rhs']:.3f}")
            if b["status"] != "pass":
                lov_bad.append(rep["map_name"])
    zz = next(r for r in result["maps"] if r["space"] == "P1" and r["map_name"] == "z_squared")
    lov = zz["lov"]
    vol_ok = all(abs(v - (2 ** n - 1)) <= 3 * se + 1e-9
                 for n, v, se in zip(lov["n_values"], lov["volumes"], lov["std_errors"]) if n <= 8)
    vol_ok &= max(lov["n_values"]) >= 8
    ok = not entropy_fail and not lov_bad and vol_ok
    report("AC6", ok, f"entropy failures {entropy_fail}; {'; '.join(notes)}; "
                      f"P1 volumes match 2^n-1: {vol_ok}")


def test_ac7_fekete_and_birational(report, corpus_run):
    result, _, _ = corpus_run
    fekete = {r["map_name"]: next(v["status"] for v in r["verdicts"]
                                  if v["check"] == "fekete subadditivity")
              for r in result["maps"]}
    docs = _docs()
    sigma = map_from_document(docs["cremona"])
    bir = check_birational_invariance(map_from_document(docs["henon"]), sigma, sigma, N=6)
    ok = all(s == "pass" for s in fekete.values()) and bir.status == "pass"
    bad = [k for k, s in fekete.items() if s != "pass"]
    report("AC7", ok, f"fekete non-pass {bad} of {len(fekete)} maps (N=8); "
                      f"henon^sigma birational {bir.status} ({bir.lhs:.3f} <= {bir.rhs:.3f})")


def test_ac8_reproducibility(report, corpus_run):
    _, first, elapsed = corpus_run
    second = dumps(run_corpus())
    ok = first == second
    report("AC8", ok, f"two corpus runs byte-identical: {ok} ({len(first)} bytes, "
                      f"{elapsed:.0f} s per run)")

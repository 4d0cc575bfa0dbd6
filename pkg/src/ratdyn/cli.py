"""Command-line interface: ``ratdyn <subcommand> ...``.

Maps are given as JSON map documents, or as ``@name`` for a bundled corpus map.
Exit codes: 0 success, 1 input error, 2 a verify/corpus verdict failed or was
inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .entropy import EntropyConfig, entropy_estimate
from .graphvol import lov_estimate
from .harness import (DEFAULTS, FAIL, INCONCLUSIVE, PASS, dumps, load_corpus, map_report, merge,
                      run_corpus, verdict_summary)
from .monomial import MonomialMap, charpoly, eigenvalues, exact_dynamical_degrees, exact_entropy
from .numeric_degrees import delta_l_estimate, topological_degree_estimate
from .parse import PolyParseError
from .poly import PolyError
from .ratmap import (DegreeBudget, MapError, RationalMap, degree_sequence, indeterminacy_probe,
                     load_map, map_from_document)


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    """Flat run settings; every numeric field must be positive."""

    seed: int = DEFAULTS["seed"]
    samples: int = DEFAULTS["dyndeg_samples"]
    lov_samples: int = DEFAULTS["lov"]["samples"]
    n_max: int | None = None
    epsilons: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.05])
    cloud: int = 50_000
    orbit_length: int = 10
    eta: float = 1e-3
    degree_budget: int = DEFAULTS["degree_budget"]["max_degree"]
    degree_N: int = DEFAULTS["degree_N"]
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in ("output_path", "format") or v is None:
                continue
            vals = v if isinstance(v, list) else [v]
            if not vals or any(not isinstance(x, (int, float)) or x <= 0 for x in vals):
                raise InputError(f"config field {f.name!r} must be positive, got {v!r}")
        if self.format not in ("json", "csv"):
            raise InputError(f"format must be 'json' or 'csv', got {self.format!r}")

    @classmethod
    def load(cls, path: str | None, overrides: dict) -> RunConfig:
        data: dict = {}
        if path:
            try:
                data = json.loads(Path(path).read_text())
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
            except OSError as exc:
                raise InputError(f"cannot read config {path}: {exc}") from None
            unknown = set(data) - {f.name for f in fields(cls)}
            if unknown:
                raise InputError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def entropy(self) -> EntropyConfig:
        return EntropyConfig(epsilons=list(self.epsilons), cloud=self.cloud, n=self.orbit_length,
                             eta=self.eta, seed=self.seed)

    def harness(self) -> dict:
        cfg = {"seed": self.seed, "dyndeg_samples": self.samples, "degree_N": self.degree_N,
               "degree_budget": {"max_degree": self.degree_budget},
               "entropy": {"epsilons": list(self.epsilons), "cloud": self.cloud,
                           "n": self.orbit_length, "eta": self.eta},
               "lov": {"samples": self.lov_samples}}
        if self.n_max is not None:
            cfg["lov"]["n_max"] = self.n_max
        return cfg


def _map(spec: str) -> tuple[RationalMap, dict]:
    """Load a map file or a bundled '@name'; also return its document."""
    if spec.startswith("@"):
        docs = {d["name"]: d for d in load_corpus()["maps"]}
        if spec[1:] not in docs:
            raise InputError(f"no bundled map {spec[1:]!r}; available: {', '.join(docs)}")
        doc = docs[spec[1:]]
        return map_from_document({k: v for k, v in doc.items() if k != "config"}), doc
    path = Path(spec)
    f = load_map(path)
    return f, json.loads(path.read_text())


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _json(payload: dict, cfg: RunConfig, command: str) -> str:
    header = {"ratdyn_version": __version__, "command": command, "config": asdict(cfg)}
    return dumps({"header": header, "result": payload})


# ---------------------------------------------------------------------------
# subcommands


def cmd_degrees(args, cfg: RunConfig) -> int:
    f, _ = _map(args.map)
    seq = degree_sequence(f, args.N or cfg.degree_N, DegreeBudget(max_degree=cfg.degree_budget))
    roots, inf, ratios = seq.fekete_roots(), seq.running_inf(), seq.ratios()
    if cfg.format == "csv":
        rows = [[n, v, "" if n == 0 else repr(roots[n - 1]), "" if n == 0 else repr(inf[n - 1]),
                 "" if n == 0 else repr(ratios[n - 1])] for n, v in enumerate(seq.values)]
        _emit(_csv(["n", "degree", "root", "running_inf", "ratio"], rows), cfg)
    else:
        _emit(_json({"map": f.to_document(), **seq.to_dict(), "fekete_roots": roots,
                     "running_inf": inf, "ratios": ratios}, cfg, "degrees"), cfg)
    return 0


def cmd_dyndeg(args, cfg: RunConfig) -> int:
    f, _ = _map(args.map)
    l = args.l or f.dim_k
    if not 1 <= l <= f.dim_k:
        raise InputError(f"-l must be between 1 and {f.dim_k}")
    est = (topological_degree_estimate(f, cfg.samples, cfg.seed) if l == f.dim_k
           else delta_l_estimate(f, l, cfg.samples, cfg.seed))
    if cfg.format == "csv":
        raise InputError("dyndeg produces a single estimate; use --format json")
    _emit(_json(est.to_dict(), cfg, "dyndeg"), cfg)
    return 0


def cmd_entropy(args, cfg: RunConfig) -> int:
    f, _ = _map(args.map)
    est = entropy_estimate(f, cfg.entropy(), indeterminacy_probe(f, seed=cfg.seed))
    if cfg.format == "csv":
        _emit(est.to_csv(), cfg)
    else:
        _emit(_json(est.to_dict(), cfg, "entropy"), cfg)
    return 0


def cmd_lov(args, cfg: RunConfig) -> int:
    f, _ = _map(args.map)
    n_max = cfg.n_max or int(DEFAULTS["lov"]["n_max"][str(min(f.dim_k, 3))])
    est = lov_estimate(f, n_max, cfg.lov_samples, cfg.seed)
    if cfg.format == "csv":
        _emit(_csv(["n", "vol", "std_error"],
                   [[n, repr(v), repr(e)] for n, v, e in zip(est.n_values, est.volumes,
                                                             est.std_errors)]), cfg)
    else:
        _emit(_json({**est.report(), "detail": est.to_dict()}, cfg, "lov"), cfg)
    return 0


def _verdict_exit(rows) -> int:
    statuses = {s for _, _, s in rows}
    return 2 if statuses & {FAIL, INCONCLUSIVE} else 0


def _print_verdicts(rows) -> None:
    for name, check, status in rows:
        print(f"{name:<16} {check:<28} {status}", file=sys.stderr)


def cmd_verify(args, cfg: RunConfig) -> int:
    _, doc = _map(args.map)
    rep = map_report(doc, cfg.harness() if args.config or args.seed else {"seed": cfg.seed})
    if cfg.format == "csv":
        raise InputError("verify emits a structured report; use --format json")
    _emit(_json(rep.to_dict(), cfg, "verify"), cfg)
    rows = [(rep.map_name, v.check, v.status) for v in rep.verdicts]
    _print_verdicts(rows)
    return _verdict_exit(rows)


def cmd_corpus(args, cfg: RunConfig) -> int:
    corpus = load_corpus(args.corpus)
    override = cfg.harness() if args.config else {"seed": cfg.seed}
    result = run_corpus(corpus, override, args.only or None)
    if cfg.format == "csv":
        _emit(_csv(["map", "check", "status"], verdict_summary(result)), cfg)
    else:
        _emit(_json(result, cfg, "corpus"), cfg)
    rows = verdict_summary(result)
    _print_verdicts(rows)
    return _verdict_exit(rows)


def cmd_monomial(args, cfg: RunConfig) -> int:
    try:
        A = json.loads(args.A)
    except json.JSONDecodeError as exc:
        raise InputError(f"-A must be a JSON matrix like [[2,1],[1,1]]: {exc.msg}") from None
    m = MonomialMap(A)
    eig = eigenvalues(m)
    out = {"matrix": [list(r) for r in m.matrix], "charpoly": charpoly(m),
           "eigenvalues": [[z.real, z.imag] for z in eig],
           "dynamical_degrees": exact_dynamical_degrees(m), "entropy": exact_entropy(m)}
    if cfg.format == "csv":
        _emit(_csv(["l", "lambda"], [[l, repr(v)] for l, v in
                                     enumerate(out["dynamical_degrees"], start=1)]), cfg)
    else:
        _emit(_json(out, cfg, "monomial"), cfg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="RunConfig JSON file")
    common.add_argument("--output", "-o", dest="output_path", help="write report here")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ratdyn", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ratdyn {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("degrees", parents=[common], help="exact degree sequence + Fekete table")
    s.add_argument("map")
    s.add_argument("-N", type=int, default=None)
    s.set_defaults(func=cmd_degrees)

    s = sub.add_parser("dyndeg", parents=[common], help="Monte-Carlo delta_l")
    s.add_argument("map")
    s.add_argument("-l", type=int, default=None, help="order (default k)")
    s.add_argument("--samples", type=int, default=None)
    s.set_defaults(func=cmd_dyndeg)

    s = sub.add_parser("entropy", parents=[common], help="separated-set entropy estimate")
    s.add_argument("map")
    s.add_argument("--epsilons", type=lambda t: [float(x) for x in t.split(",")], default=None)
    s.add_argument("--cloud", type=int, default=None)
    s.add_argument("-n", dest="orbit_length", type=int, default=None)
    s.add_argument("--eta", type=float, default=None)
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("lov", parents=[common], help="graph volumes and lov")
    s.add_argument("map")
    s.add_argument("--n-max", dest="n_max", type=int, default=None)
    s.add_argument("--samples", dest="lov_samples", type=int, default=None)
    s.set_defaults(func=cmd_lov)

    s = sub.add_parser("verify", parents=[common], help="full invariant report for one map")
    s.add_argument("map")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("corpus", parents=[common], help="verify every bundled map")
    s.add_argument("--corpus", default=None, help="alternative corpus JSON")
    s.add_argument("--only", nargs="*", default=None, help="restrict to these map names")
    s.set_defaults(func=cmd_corpus)

    s = sub.add_parser("monomial", parents=[common], help="exact invariants of a monomial map")
    s.add_argument("-A", required=True, help="integer matrix as JSON, e.g. [[2,1],[1,1]]")
    s.set_defaults(func=cmd_monomial)
    return p


_CONFIG_ARGS = ("seed", "samples", "lov_samples", "n_max", "epsilons", "cloud", "orbit_length",
                "eta", "output_path", "format")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    overrides = {k: getattr(args, k) for k in _CONFIG_ARGS if hasattr(args, k)}
    if getattr(args, "samples", None) is not None and args.command == "lov":
        overrides["lov_samples"] = args.samples
    try:
        cfg = RunConfig.load(args.config, overrides)
        return args.func(args, cfg)
    except (InputError, PolyParseError, PolyError, MapError) as exc:
        print(f"ratdyn: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ratdyn: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

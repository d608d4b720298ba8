"""Command-line front end: verify, homology, scan-constants and tree-demo.

Configuration is YAML.  Every numeric parameter is an integer or an exact
rational written "p/q"; floats are rejected.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import yaml

from .conjugacy import Section, sigma_prime_exact
from .geometry import approximating_tree, delta_estimate, tree_log_bound
from .groups import CayleyBall, GroupModel, InvalidInput, ResourceLimit, model_from_spec
from .homology import (
    BettiTable,
    TruncationSpec,
    burghelea_check,
    gamma_tors_report,
    group_homology_rips,
    per_class_homology,
)
from .norms import ScanContext, bound_scan, constants_csv
from .resolutions import Bicombing, Nabla, RipsProjection, Theta
from .verify import (
    SuiteResult,
    contraction_checks,
    nu_identity,
    operator_identities,
    resolution_checks,
    splitting_identity,
    tree_checks,
)

log = logging.getLogger("cyclichyp")

SUITES = ("operators", "geometry", "resolutions", "constants", "homology")
SCHEMA = "cyclichyp-report/1"
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


class ConfigError(InvalidInput):
    pass


def parse_rational(x, name: str) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ConfigError(f"{name}: write numbers as integers or p/q, not {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            if "." in x or "e" in x.lower():
                raise ValueError
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{name}: {x!r} is not an integer or p/q") from None
    raise ConfigError(f"{name}: expected a number, got {type(x).__name__}")


def parse_int(x, name: str, low: int = 0) -> int:
    q = parse_rational(x, name)
    if q.denominator != 1 or q < low:
        raise ConfigError(f"{name}: expected an integer ≥ {low}")
    return int(q)


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class ConstantsConfig:
    lambda0: Fraction = Fraction(3)
    lambda1: Fraction = Fraction(2)
    split_lambda0: Fraction = Fraction(9)
    weight_cap: int = 5
    degree_cap: int = 3
    c25_degree_cap: int = 1
    k_max: int = 3
    budget: int = 1500
    twists: list = field(default_factory=list)

    @classmethod
    def from_mapping(cls, m: dict) -> "ConstantsConfig":
        out = cls()
        for key in ("lambda0", "lambda1", "split_lambda0"):
            if key in m:
                setattr(out, key, parse_rational(m[key], f"constants.{key}"))
        for key in ("weight_cap", "degree_cap", "c25_degree_cap", "k_max", "budget"):
            if key in m:
                setattr(out, key, parse_int(m[key], f"constants.{key}"))
        if "twists" in m:
            out.twists = [str(t) for t in m["twists"]]
        unknown = set(m) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown constants keys: {sorted(unknown)}")
        return out

    def to_mapping(self) -> dict:
        return {"lambda0": _frac(self.lambda0), "lambda1": _frac(self.lambda1),
                "split_lambda0": _frac(self.split_lambda0), "weight_cap": self.weight_cap,
                "degree_cap": self.degree_cap, "c25_degree_cap": self.c25_degree_cap,
                "k_max": self.k_max, "budget": self.budget, "twists": list(self.twists)}


@dataclass
class RunConfig:
    group: dict
    ball_radius: int = 4
    degree_cap: int = 2
    weight_cap: int | None = None
    rips: int = 4
    suites: list = field(default_factory=lambda: list(SUITES))
    seed: int = 0
    classes: list = field(default_factory=list)
    samples: int = 200
    delta: Fraction | None = None
    constants: ConstantsConfig = field(default_factory=ConstantsConfig)

    KEYS = ("group", "ball_radius", "truncation", "suites", "seed", "classes", "samples",
            "delta", "constants")

    @classmethod
    def from_mapping(cls, m) -> "RunConfig":
        if not isinstance(m, dict):
            raise ConfigError("config must be a mapping")
        unknown = set(m) - set(cls.KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "group" not in m:
            raise ConfigError("config needs a 'group' declaration")
        model_from_spec(m["group"])
        cfg = cls(group=dict(m["group"]))
        if "ball_radius" in m:
            cfg.ball_radius = parse_int(m["ball_radius"], "ball_radius", 1)
        tr = m.get("truncation") or {}
        if not isinstance(tr, dict):
            raise ConfigError("truncation must be a mapping")
        bad = set(tr) - {"degree_cap", "weight_cap", "rips"}
        if bad:
            raise ConfigError(f"unknown truncation keys: {sorted(bad)}")
        if "degree_cap" in tr:
            cfg.degree_cap = parse_int(tr["degree_cap"], "truncation.degree_cap")
        if tr.get("weight_cap") is not None:
            cfg.weight_cap = parse_int(tr["weight_cap"], "truncation.weight_cap")
        if "rips" in tr:
            cfg.rips = parse_int(tr["rips"], "truncation.rips", 1)
        if "suites" in m:
            suites = m["suites"]
            if suites == "all" or suites == ["all"]:
                suites = list(SUITES)
            if not isinstance(suites, list) or any(s not in SUITES for s in suites):
                raise ConfigError(f"suites must be drawn from {SUITES} or 'all'")
            cfg.suites = list(suites)
        if "seed" in m:
            cfg.seed = parse_int(m["seed"], "seed")
        if "samples" in m:
            cfg.samples = parse_int(m["samples"], "samples", 1)
        if "classes" in m:
            if not isinstance(m["classes"], list):
                raise ConfigError("classes must be a list of words")
            cfg.classes = [str(c) for c in m["classes"]]
        if m.get("delta") is not None:
            cfg.delta = parse_rational(m["delta"], "delta")
        if "constants" in m:
            if not isinstance(m["constants"], dict):
                raise ConfigError("constants must be a mapping")
            cfg.constants = ConstantsConfig.from_mapping(m["constants"])
        return cfg

    def to_mapping(self) -> dict:
        return {
            "group": dict(self.group),
            "ball_radius": self.ball_radius,
            "truncation": {"degree_cap": self.degree_cap, "weight_cap": self.weight_cap, "rips": self.rips},
            "suites": list(self.suites),
            "seed": self.seed,
            "classes": list(self.classes),
            "samples": self.samples,
            "delta": None if self.delta is None else _frac(self.delta),
            "constants": self.constants.to_mapping(),
        }

    def model(self) -> GroupModel:
        return model_from_spec(self.group)

    def spec(self) -> TruncationSpec:
        return TruncationSpec(self.degree_cap, self.weight_cap, self.rips)


def load_config(path: str, seed: int | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from None
    cfg = RunConfig.from_mapping(data)
    if seed is not None:
        cfg.seed = seed
    return cfg


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _parse_words(model, words):
    try:
        return [model.parse(w) for w in words]
    except Exception as exc:
        raise ConfigError(f"cannot parse class word: {exc}") from None


def run_constants(cfg: RunConfig, model) -> tuple:
    cc = cfg.constants
    words = cc.twists or ["e"] + cfg.classes
    twists = list(dict.fromkeys(_parse_words(model, words)))
    nb = Nabla(RipsProjection(Theta(Bicombing(model)), cfg.rips))
    ctx = ScanContext(nabla=nb, vanishing_degree=nb.tp.vanishing_degree)
    hyperbolic = [v for v in twists if model.order(v) is None]
    for v in hyperbolic:
        ctx.sections[v] = (Section(v), sigma_prime_exact(v))
    out = []
    for op in ("identity", "C20", "C21", "C22"):
        out.append(bound_scan(op, twists, cc.degree_cap, cc.weight_cap, cc.lambda0, cc.lambda1,
                              ctx, seed=cfg.seed, budget=cc.budget))
    out.append(bound_scan("C25", twists, cc.c25_degree_cap, cc.weight_cap, cc.lambda0, cc.lambda1,
                          ctx, seed=cfg.seed, budget=cc.budget, k_max=cc.k_max))
    if hyperbolic:
        out.append(bound_scan("C26", hyperbolic, min(cc.degree_cap, 2), cc.weight_cap, cc.split_lambda0,
                              cc.lambda1, ctx, seed=cfg.seed, budget=cc.budget))
    failures = [c.name for c in out if not c.finite()]
    return out, failures


def cmd_verify(cfg: RunConfig, threads: int = 1) -> tuple:
    model = cfg.model()
    results = []
    constants = []
    for suite in cfg.suites:
        if suite == "operators":
            results.append(operator_identities(model, min(cfg.degree_cap, 4), cfg.weight_cap or 6))
            for v in model.torsion_class_reps():
                results.append(nu_identity(model, v, min(cfg.degree_cap, 3), 5))
            for w in cfg.classes:
                v = model.parse(w)
                if model.order(v) is None:
                    results.append(splitting_identity(model, v, 2, cfg.weight_cap or 6))
        elif suite == "geometry":
            results.append(tree_checks(model, max(cfg.ball_radius, 2), seed=cfg.seed, delta=cfg.delta))
            results.append(contraction_checks(model, cfg.samples, cfg.seed))
        elif suite == "resolutions":
            results.append(resolution_checks(model, cfg.rips, cfg.samples, cfg.seed))
        elif suite == "constants":
            constants, failed = run_constants(cfg, model)
            r = SuiteResult("constants")
            for c in constants:
                r.record(c.finite(), f"{c.name} is not finite")
            results.append(r)
        elif suite == "homology":
            rep = homology_report(cfg, model, threads)
            r = SuiteResult("homology")
            r.record(rep["burghelea"]["pass"], "Burghelea comparison")
            r.record(rep["gamma_tors"]["agree"], "torsion-class comparison")
            r.details = {"group_homology": rep["group_homology"]}
            results.append(r)
    passed = all(r.passed for r in results)
    report = {"suites": [r.to_json() for r in results],
              "constants": [c.to_row() for c in constants], "passed": passed}
    return report, passed, constants


def _class_job(args):
    group, word, theory, spec = args
    model = model_from_spec(group)
    h = per_class_homology(model, model.parse(word) if word != "e" else model.identity, theory, spec)
    return {"class": h.rep, "theory": h.theory, "dims": h.dims, "stable": h.stable,
            "caps": list(h.caps), "extra": h.extra}


def homology_report(cfg: RunConfig, model, threads: int = 1) -> dict:
    spec = cfg.spec()
    gh = group_homology_rips(model, cfg.rips, cfg.degree_cap, delta=cfg.delta)
    words = [str(v) for v in model.torsion_class_reps()] + [w for w in cfg.classes]
    words = list(dict.fromkeys(words))
    jobs = [(cfg.group, w, theory, spec) for w in words for theory in ("HH", "HC")]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_class_job, jobs))
    else:
        rows = [_class_job(j) for j in jobs]
    table = BettiTable()
    table.add("group:" + model.name, gh.dims(model.name), gh.flags(model.name))
    for r in rows:
        table.add(f"{r['theory']}:<{r['class']}>", r["dims"], r["stable"])
    low = TruncationSpec(min(cfg.degree_cap, 1), cfg.weight_cap, cfg.rips)
    return {
        "group_homology": gh.dims(model.name),
        "per_class": rows,
        "burghelea": burghelea_check(model, spec, R=cfg.rips),
        "gamma_tors": gamma_tors_report(model, low, R=cfg.rips),
        "table": table,
    }


def cmd_homology(cfg: RunConfig, threads: int = 1) -> tuple:
    model = cfg.model()
    rep = homology_report(cfg, model, threads)
    table = rep.pop("table")
    passed = rep["burghelea"]["pass"] and rep["gamma_tors"]["agree"]
    rep["passed"] = passed
    return rep, passed, table


def cmd_tree_demo(cfg: RunConfig, size: int = 6) -> dict:
    model = cfg.model()
    ball = CayleyBall(model, cfg.ball_radius)
    rng = random.Random(cfg.seed)
    F = list(dict.fromkeys(rng.sample(ball.elements, min(size, len(ball.elements)))))
    tree, phi = approximating_tree(F, model.distance)
    delta = cfg.delta
    if delta is None and cfg.ball_radius >= 2:
        delta = delta_estimate(CayleyBall(model, min(cfg.ball_radius, 4)), seed=cfg.seed).value
    return {
        "points": [str(x) for x in F],
        "phi": {str(x): [p[0], _frac(p[1])] for x, p in zip(F, phi)},
        "edges": tree.edge_list_text().splitlines(),
        "k": tree_log_bound(len(F)),
        "delta": None if delta is None else _frac(delta),
        "distortion": {f"{F[i]},{F[j]}": _frac(model.distance(F[i], F[j]) - tree.distance(phi[i], phi[j]))
                       for i in range(len(F)) for j in range(i + 1, len(F))},
    }


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def write_report(out: Path, name: str, command: str, cfg: RunConfig, body: dict) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    doc = {"schema": SCHEMA, "command": command, "config": cfg.to_mapping(),
           "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"), "result": body}
    path = out / name
    path.write_text(_dump(doc))
    return path


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cyclichyp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "run the configured verification suites"),
                        ("homology", "Betti tables and the torsion-class comparison"),
                        ("scan-constants", "empirical constant scans"),
                        ("tree-demo", "approximating tree of a seeded subset")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--out", default="out", metavar="DIR")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.seed)
    except InvalidInput as exc:
        print(f"cyclichyp: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.threads < 1:
        print("cyclichyp: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        if args.command == "verify":
            body, ok, constants = cmd_verify(cfg, args.threads)
            write_report(out, "verify.json", "verify", cfg, body)
            if constants:
                (out / "constants.csv").write_text(constants_csv(constants))
            if not ok:
                for s in body["suites"]:
                    for f in s["failures"]:
                        print(f"FAIL {s['name']}: {f}", file=sys.stderr)
            return 0 if ok else EXIT_FAIL
        if args.command == "homology":
            body, ok, table = cmd_homology(cfg, args.threads)
            write_report(out, "homology.json", "homology", cfg, body)
            (out / "homology.csv").write_text(table.to_csv())
            return 0 if ok else EXIT_FAIL
        if args.command == "scan-constants":
            constants, failed = run_constants(cfg, cfg.model())
            write_report(out, "constants.json", "scan-constants", cfg,
                         {"constants": [c.to_row() for c in constants], "non_finite": failed})
            out.mkdir(parents=True, exist_ok=True)
            (out / "constants.csv").write_text(constants_csv(constants))
            return 0 if not failed else EXIT_FAIL
        if args.command == "tree-demo":
            body = cmd_tree_demo(cfg)
            write_report(out, "tree.json", "tree-demo", cfg, body)
            (out / "tree_edges.txt").write_text("\n".join(body["edges"]) + "\n")
            return 0
    except ResourceLimit as exc:
        write_report(out, "partial.json", args.command, cfg, {"truncated": str(exc)})
        print(f"cyclichyp: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvalidInput as exc:
        print(f"cyclichyp: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

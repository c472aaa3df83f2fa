"""Suite-comparison experiments: generate, execute against mutants, aggregate, report.

Every case is run once against the unmutated SUT (for SUT coverage) and once
against each mutant; suites and resampled sub-suites are then scored from
these per-case results, so resampling costs no further executions.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

from ..coverage import CoverageMap, cd_ratio, enumerate_universe
from ..dsl.suites import parse_spec, read_suite
from ..errors import ConfigError, DegenerateVariance, MbtError
from ..harness.adapter import read_adapter
from ..harness.execute import model_phases, run_test
from ..harness.mutate import read_manifest
from ..harness.sut import ModelSut
from ..model.engine import Runtime
from ..model.validate import ensure_valid
from ..resources import read_model
from ..testgen.generate import GenerationConfig, generate_B, generate_C, generate_D
from ..testgen.spec import TRIVIAL
from .stats import draws, mean_ci, pearson

GENERATED = ("B", "C", "D")
MANUAL = ("A", "E", "F", "G")


class LabError(MbtError):
    def __init__(self, phase, cause):
        super().__init__(f"{phase}: {cause}")
        self.phase = phase
        self.cause = cause


@dataclass
class LabConfig:
    model: str
    sut: str
    adapter: str
    specs: list
    suites: list
    mutants: str = None
    sanity: dict = None
    master_seed: int = 1
    generation: dict = field(default_factory=dict)
    pools: dict = field(default_factory=lambda: {"C": 150, "D": 150})
    coverage_n: list = field(default_factory=lambda: [10, 25, 50])
    resample_count: int = 25
    ci_level: float = 0.98
    out: str = "lab-out"
    base: str = "."  # directory relative paths are resolved against

    @classmethod
    def from_json(cls, doc, base="."):
        known = set(cls.__dataclass_fields__) - {"base"}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown lab config keys: {sorted(extra)}")
        try:
            cfg = cls(**doc, base=base)
        except TypeError as exc:
            raise ConfigError(f"bad lab config: {exc}") from None
        cfg.check()
        return cfg

    @classmethod
    def read(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_json(doc, os.path.dirname(os.path.abspath(path)))

    def path(self, p):
        return p if os.path.isabs(p) else os.path.join(self.base, p)

    def check(self):
        if not 0 < self.ci_level < 1:
            raise ConfigError("ci_level must lie in (0, 1)")
        if self.resample_count < 2:
            raise ConfigError("resample_count must be at least 2")
        names = set()
        for s in self.suites:
            if s.get("name") in names:
                raise ConfigError(f"duplicate suite name {s.get('name')}")
            names.add(s.get("name"))
            kind = s.get("kind")
            if kind in MANUAL:
                if "file" not in s:
                    raise ConfigError(f"suite {s['name']}: manual suites need a file")
            elif kind in GENERATED:
                if not s.get("pool") and int(s.get("n", 0)) < 1:
                    raise ConfigError(f"suite {s['name']}: size must be at least 1")
            else:
                raise ConfigError(f"suite {s.get('name')}: unknown kind {kind}")
        for n in self.coverage_n:
            if n < 1:
                raise ConfigError("coverage_n sizes must be positive")
        self.generation_config()

    def generation_config(self):
        unknown = set(self.generation) - set(GenerationConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown generation keys: {sorted(unknown)}")
        return GenerationConfig(**{k: tuple(v) if isinstance(v, list) else v
                                   for k, v in self.generation.items()})

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "base"}


@dataclass
class ExperimentReport:
    config: dict = field(default_factory=dict)
    universe: dict = field(default_factory=dict)
    mutants: list = field(default_factory=list)
    generation: dict = field(default_factory=dict)
    suites: list = field(default_factory=list)
    coverage_vs_n: list = field(default_factory=list)
    diffs: list = field(default_factory=list)
    correlations: dict = field(default_factory=dict)
    purity: float = None

    def suite(self, name):
        for s in self.suites:
            if s["name"] == name:
                return s
        raise KeyError(name)

    def to_json(self):
        return {
            "config": self.config, "universe": self.universe, "mutants": self.mutants,
            "generation": self.generation, "suites": self.suites,
            "coverage_vs_n": self.coverage_vs_n, "diffs": self.diffs,
            "correlations": self.correlations, "purity": self.purity,
        }


def _sig_text(sig):
    return "|".join(sig)


@dataclass
class _CaseResult:
    model_events: frozenset
    sut_events: frozenset
    base_pass: bool
    kills: dict  # mutant id -> signature text


class _Scorer:
    """Per-case results and suite-level aggregation over them."""

    def __init__(self, model_u, sut_u, mutant_ids):
        self.model_u, self.sut_u = model_u, sut_u
        self.mutant_ids = mutant_ids
        self.results = {}

    def score(self, cases):
        mcov, scov = CoverageMap(self.model_u), CoverageMap(self.sut_u)
        killed, classes = set(), set()
        base_failures = 0
        for c in cases:
            r = self.results[c.id]
            mcov.record_all(r.model_events)
            scov.record_all(r.sut_events)
            killed |= set(r.kills)
            classes |= set(r.kills.values())
            base_failures += not r.base_pass
        return {
            "size": len(cases),
            "errors": len(classes),
            "killed": len(killed),
            "model_cov": float(cd_ratio(mcov)),
            "sut_cov": float(cd_ratio(scov)),
            "sut_cov_concrete": float(cd_ratio(scov.restrict(True))),
            "base_failures": base_failures,
            "classes": sorted(classes),
            "killed_ids": sorted(killed),
        }


def _phase(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except LabError:
        raise
    except MbtError as exc:
        raise LabError(name, exc) from exc
    except OSError as exc:
        raise LabError(name, exc) from exc


def _load(cfg):
    model = read_model(cfg.path(cfg.model))
    ensure_valid(model)
    sut = read_model(cfg.path(cfg.sut))
    ensure_valid(sut)
    adapter = read_adapter(cfg.path(cfg.adapter), model, sut)
    specs = []
    for p in cfg.specs:
        with open(cfg.path(p), encoding="utf-8") as fh:
            doc = parse_spec(fh.read())
        specs.extend(doc.specs if hasattr(doc, "specs") else [doc])
    sanity = parse_spec(json.dumps(cfg.sanity)) if cfg.sanity else TRIVIAL
    mutants = read_manifest(cfg.path(cfg.mutants), sut) if cfg.mutants else []
    manual = {s["name"]: read_suite(cfg.path(s["file"])) for s in cfg.suites if s["kind"] in MANUAL}
    return model, sut, adapter, specs, sanity, mutants, manual


def _generate(cfg, rt, specs, sanity):
    gcfg = cfg.generation_config()
    kinds = {s["kind"] for s in cfg.suites} & set(GENERATED)
    pools = {}
    seed = cfg.master_seed
    if "B" in kinds:
        pools["B"] = generate_B(rt, specs, gcfg, seed)
    if "C" in kinds:
        pools["C"] = generate_C(rt, int(cfg.pools.get("C", 150)), gcfg, seed)
    if "D" in kinds:
        pools["D"] = generate_D(rt, int(cfg.pools.get("D", 150)), sanity, gcfg, seed)
    return pools


def _configured(cfg, pools, manual):
    out = []
    for s in cfg.suites:
        if s["kind"] in MANUAL:
            cases = list(manual[s["name"]].cases)
        elif s.get("pool"):
            cases = list(pools[s["kind"]].cases)
        else:
            pool = list(pools[s["kind"]].cases)
            (idx,) = draws(len(pool), int(s["n"]), 1, f"{cfg.master_seed}/{s['name']}")
            cases = [pool[i] for i in idx]
        out.append((s, cases))
    return out


def _execute(cases, rt_model, irt_model, sut, mutants, adapter, scorer):
    from ..coverage import case_events

    base = ModelSut(sut)
    msuts = [(m.id, ModelSut(m.model)) for m in mutants]
    for c in cases:
        if c.id in scorer.results:
            continue
        model_events = frozenset(case_events(irt_model, c))
        phases = model_phases(rt_model, c)
        verdict, sut_events = run_test(base, adapter, c, phases=phases)
        kills = {}
        for mid, msut in msuts:
            v, _ = run_test(msut, adapter, c, phases=phases)
            if not v.passed:
                kills[mid] = _sig_text(v.signature())
        scorer.results[c.id] = _CaseResult(model_events, sut_events, verdict.passed, kills)


def _resample(cfg, pools, scorer):
    rows, points = [], []
    for kind in GENERATED:
        if kind not in pools:
            continue
        pool = list(pools[kind].cases)
        for n in cfg.coverage_n:
            if n > len(pool):
                continue
            scores = [scorer.score([pool[i] for i in idx])
                      for idx in draws(len(pool), n, cfg.resample_count,
                                       f"{cfg.master_seed}/{kind}")]
            row = {"kind": kind, "n": n, "reps": len(scores)}
            for key in ("model_cov", "sut_cov", "killed", "errors"):
                mean, hw = mean_ci([s[key] for s in scores], cfg.ci_level)
                row[key] = mean
                row[key + "_hw"] = hw
            rows.append(row)
            points.extend(scores)
    return rows, points


CORRELATIONS = (
    ("model_cov~errors", "model_cov", "errors"),
    ("sut_cov~errors", "sut_cov", "errors"),
    ("model_cov~sut_cov", "model_cov", "sut_cov"),
    ("model_cov~killed", "model_cov", "killed"),
    ("sut_cov~killed", "sut_cov", "killed"),
)


def _correlate(points):
    out = {}
    for name, a, b in CORRELATIONS:
        try:
            c = pearson([p[a] for p in points], [p[b] for p in points])
            out[name] = {"r": c.r, "t": c.t if abs(c.t) != float("inf") else None, "p": c.p, "n": c.n}
        except (DegenerateVariance, ValueError) as exc:
            out[name] = {"r": None, "reason": str(exc), "n": len(points)}
    return out


def _diffs(results):
    rows = []
    for x in results:
        for y in results:
            if x["name"] >= y["name"]:
                continue
            ex, ey = set(x["classes"]), set(y["classes"])
            kx, ky = set(x["killed_ids"]), set(y["killed_ids"])
            rows.append({
                "x": x["name"], "y": y["name"],
                "errors_x_not_y": len(ex - ey), "errors_y_not_x": len(ey - ex),
                "killed_x_not_y": len(kx - ky), "killed_y_not_x": len(ky - kx),
            })
    return rows


def _purity(scorer, cases):
    """Mean majority-mutant fraction of the signature classes seen on ``cases``."""
    groups = {}
    for c in cases:
        for mid, sig in scorer.results[c.id].kills.items():
            groups.setdefault(sig, []).append(mid)
    if not groups:
        return None
    fracs = []
    for members in groups.values():
        counts = {}
        for m in members:
            counts[m] = counts.get(m, 0) + 1
        fracs.append(max(counts.values()) / len(members))
    return sum(fracs) / len(fracs)


def run_lab(cfg, artifacts=None):
    """Run the configured experiment and return its report (nothing is written).

    If ``artifacts`` is a dict it receives the generated pools (by kind) and
    the selected suites (by name) for further inspection.
    """
    model, sut, adapter, specs, sanity, mutants, manual = _phase("load", _load, cfg)
    rt = _phase("load", Runtime, model)
    irt = _phase("load", Runtime, model, instrument=True)
    pools = _phase("generate", _generate, cfg, rt, specs, sanity)
    suites = _phase("select", _configured, cfg, pools, manual)
    scorer = _Scorer(enumerate_universe(model), enumerate_universe(sut), [m.id for m in mutants])
    everything = [c for _, cs in suites for c in cs] + [c for p in pools.values() for c in p.cases]
    _phase("execute", _execute, everything, rt, irt, sut, mutants, adapter, scorer)
    if artifacts is not None:
        artifacts["pools"] = pools
        artifacts["suites"] = {s["name"]: cases for s, cases in suites}

    report = ExperimentReport()
    report.config = cfg.to_json()
    report.universe = {
        "model_items": len(scorer.model_u.items), "model_target": scorer.model_u.target,
        "sut_items": len(scorer.sut_u.items), "sut_target": scorer.sut_u.target,
        "sut_concrete_items": len(scorer.sut_u.restrict(True).items),
    }
    report.mutants = [m.to_json() for m in mutants]
    report.generation = {
        k: {"cases": len(p.cases), **{g: p.generator[g] for g in sorted(p.generator)
                                      if g in ("duplicates_dropped", "timed_out", "unsatisfied")}}
        for k, p in sorted(pools.items())
    }
    for s, cases in suites:
        report.suites.append({"name": s["name"], "kind": s["kind"], **scorer.score(cases)})
    report.coverage_vs_n, points = _phase("statistics", _resample, cfg, pools, scorer)
    report.correlations = _correlate(points)
    report.diffs = _diffs(report.suites)
    report.purity = _purity(scorer, everything)
    return report


# -- report files ---------------------------------------------------------------


def _num(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def emit_report(report, outdir):
    """Write report.json, the CSV tables and plot-ready .dat files; returns the paths."""
    os.makedirs(outdir, exist_ok=True)
    files = {}
    files["report.json"] = json.dumps(report.to_json(), indent=2, ensure_ascii=False) + "\n"
    files["suites.csv"] = _csv(
        ["suite", "kind", "size", "errors", "killed", "modelCov", "sutCov"],
        [[s["name"], s["kind"], s["size"], s["errors"], s["killed"], s["model_cov"], s["sut_cov"]]
         for s in report.suites])
    files["coverage_vs_n.csv"] = _csv(
        ["kind", "n", "reps", "modelCov", "modelCovHalfWidth", "sutCov", "sutCovHalfWidth",
         "killed", "killedHalfWidth", "errors", "errorsHalfWidth"],
        [[r["kind"], r["n"], r["reps"], r["model_cov"], r["model_cov_hw"], r["sut_cov"],
          r["sut_cov_hw"], r["killed"], r["killed_hw"], r["errors"], r["errors_hw"]]
         for r in report.coverage_vs_n])
    files["diff_matrix.csv"] = _csv(
        ["x", "y", "errorsXnotY", "errorsYnotX", "killedXnotY", "killedYnotX"],
        [[d["x"], d["y"], d["errors_x_not_y"], d["errors_y_not_x"], d["killed_x_not_y"],
          d["killed_y_not_x"]] for d in report.diffs])
    lines = ["# index suite errors killed modelCov sutCov"]
    for i, s in enumerate(report.suites):
        lines.append(" ".join([str(i), s["name"], str(s["errors"]), str(s["killed"]),
                               _num(s["model_cov"]), _num(s["sut_cov"])]))
    files["suites.dat"] = "\n".join(lines) + "\n"
    lines = ["# one block per kind: n modelCov low high sutCov low high"]
    for kind in GENERATED:
        rows = [r for r in report.coverage_vs_n if r["kind"] == kind]
        if not rows:
            continue
        lines += ["", f"# kind {kind}"]
        for r in rows:
            m, mh, s, sh = r["model_cov"], r["model_cov_hw"], r["sut_cov"], r["sut_cov_hw"]
            lines.append(" ".join(_num(v) for v in (r["n"], m, m - mh, m + mh, s, s - sh, s + sh)))
    files["coverage_vs_n.dat"] = "\n".join(lines) + "\n"
    paths = []
    for name, text in files.items():
        path = os.path.join(outdir, name)
        _write(path, text)
        paths.append(path)
    return paths


def load_report(outdir):
    with open(os.path.join(outdir, "report.json"), encoding="utf-8") as fh:
        doc = json.load(fh)
    return ExperimentReport(**doc)


def summarize(report):
    """Plain-text table of the per-suite results."""
    lines = [f"{'suite':<6} {'kind':<4} {'size':>5} {'errors':>6} {'killed':>6} {'modelCov':>9} {'sutCov':>7}"]
    for s in report.suites:
        lines.append(f"{s['name']:<6} {s['kind']:<4} {s['size']:>5} {s['errors']:>6} {s['killed']:>6} "
                     f"{s['model_cov']:>9.3f} {s['sut_cov']:>7.3f}")
    for r in report.coverage_vs_n:
        lines.append(f"coverage {r['kind']} n={r['n']}: {r['model_cov']:.3f} ± {r['model_cov_hw']:.3f}")
    return "\n".join(lines)


__all__ = ["LabConfig", "ExperimentReport", "LabError", "run_lab", "emit_report", "load_report",
           "summarize"]

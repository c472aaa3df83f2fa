"""Concrete test suites from model traces: kinds B (spec-guided), C (unguided), D (model-free inputs)."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from itertools import product

from ..errors import ConfigError, SpecUnsatisfiedWithinBound
from ..model.evaluator import DEFAULT_FUEL
from ..model.values import ABSENT, value_key
from ..suite import Step, Suite, TestCase, model_hash
from .explore import ExploreConfig, explore
from .postamble import add_postamble
from .spec import SATISFIED, TRIVIAL, VIOLATED, Monitor, check_spec
from .symbolic import _observed
from .universe import Universe, UniverseConfig


@dataclass(frozen=True)
class GenerationConfig:
    len_min: int = 8
    len_max: int = 25
    depth: int = 3
    int_range: tuple = (0, 3)
    per_type: tuple = ()  # (type name, depth) pairs
    seed_count: int = 15
    per_seed_pick: int = 2
    pool: int = 6  # traces taken from each exploration before picking
    node_budget: int = 600
    fuel: int = DEFAULT_FUEL
    max_wall_time: float = None
    grouping: str = "exact"
    postamble: bool = True
    keep_going: bool = False

    def __post_init__(self):
        if not 1 <= self.len_min <= self.len_max:
            raise ConfigError("need 1 <= len_min <= len_max")
        for name in ("depth", "seed_count", "per_seed_pick", "pool", "node_budget", "fuel"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")

    def universe_config(self):
        return UniverseConfig(self.depth, tuple(self.int_range), dict(self.per_type))

    def explore_config(self):
        return ExploreConfig(self.len_min, self.len_max, self.node_budget, self.max_wall_time,
                             self.grouping, True, self.pool)


def derive_seed(seed, *parts):
    """Stable sub-seed for a job, independent of Python's hash randomisation."""
    text = "/".join([str(seed), *map(str, parts)])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:6], "big")


def inputs_universe(rt, config):
    root = rt.model.root()
    ports = [(p.name, p.type) for p in root.ports if p.direction == "in"]
    return Universe(rt.model, config.universe_config()).port_inputs(ports)


# -- concretization -----------------------------------------------------------


def concretize_trace(rt, trace, seed, spec=None, case_id="case", provenance=None):
    """Pick one concrete input per step consistent with the symbolic trace.

    Picks are seeded and uniform over each input set; for coarse groupings a
    backtracking search keeps only picks that reproduce the recorded
    transition choices and monitor states.  Expected outputs come from a
    strict-mode run on the picked inputs.  Returns None if no witness exists.
    """
    rng = random.Random(seed)
    monitor = Monitor(spec) if spec is not None else None

    def candidates(step):
        sets = step.input_sets()
        pools = [sorted(sets[p], key=value_key) for p in rt.in_ports]
        out = [dict(zip(rt.in_ports, combo)) for combo in product(*pools)]
        rng.shuffle(out)
        return out

    def search(i, state, mstate):
        if i == len(trace.steps):
            return []
        step = trace.steps[i]
        for inp in candidates(step):
            r = rt.step_with_choices(state, inp, step.choices)
            if r is None:
                continue
            new, outputs = r
            if step.concrete is not None and new != step.concrete:
                continue
            m2 = None
            if monitor is not None:
                m2 = monitor.step(mstate, _observed(rt, inp, new, outputs))
                if m2 != step.monitor:
                    continue
            rest = search(i + 1, new, m2)
            if rest is not None:
                return [inp] + rest
        return None

    picked = search(0, rt.initial_state(), monitor.start if monitor else None)
    if picked is None:
        return None
    return case_from_inputs(rt, picked, case_id, provenance)


def case_from_inputs(rt, inputs, case_id, provenance=None):
    """Test case whose expected outputs are the strict-mode outputs on ``inputs``."""
    steps = []
    full = [{p: inp.get(p, ABSENT) for p in rt.in_ports} for inp in inputs]
    for inp, st in zip(full, rt.run(full)):
        steps.append(Step(inp, dict(st.outputs)))
    return TestCase(case_id, tuple(steps), len(steps), 0, dict(provenance or {}))


# -- suites ---------------------------------------------------------------------


@dataclass
class GenerationReport:
    duplicates_dropped: int = 0
    timed_out: bool = False
    unsatisfied: list = field(default_factory=list)
    traces: int = 0


def _finish(rt, kind, seed, cases, report, config, extra=None):
    if config.postamble and rt.model.observe is not None:
        cases = [add_postamble(c, rt) for c in cases]
    gen = {"kind": kind, "seed": seed, "duplicates_dropped": report.duplicates_dropped,
           "timed_out": report.timed_out}
    gen.update(extra or {})
    return Suite(model_hash(rt.model), gen, tuple(cases))


def _pick_from_stream(rt, spec, config, job_seed, universe, report):
    run = explore(rt, spec, config.explore_config(), job_seed, universe)
    traces = list(run)
    report.timed_out |= run.timed_out
    report.traces += len(traces)
    rng = random.Random(job_seed)
    picks = rng.sample(range(len(traces)), min(config.per_seed_pick, len(traces)))
    return [traces[i] for i in sorted(picks)]


def generate_B(rt, specs, config=None, seed=0):
    """Spec-guided suite: every spec explored under ``seed_count`` seeds."""
    config = config or GenerationConfig()
    universe = inputs_universe(rt, config)
    report = GenerationReport()
    cases, seen = [], set()
    for spec in specs:
        check_spec(spec, rt.observable)
        found = 0
        for j in range(config.seed_count):
            job = derive_seed(seed, "B", spec.id, j)
            for k, tr in enumerate(_pick_from_stream(rt, spec, config, job, universe, report)):
                prov = {"kind": "B", "seed": seed, "spec_id": spec.id, "job": j}
                case = concretize_trace(rt, tr, derive_seed(job, k), spec,
                                        f"B-{spec.id}-{j}-{k}", prov)
                if case is None:
                    continue
                found += 1
                if case.input_key() in seen:
                    report.duplicates_dropped += 1
                    continue
                seen.add(case.input_key())
                cases.append(case)
        if found == 0:
            report.unsatisfied.append(spec.id)
            if not config.keep_going:
                raise SpecUnsatisfiedWithinBound(spec.id)
    extra = {"specs": [s.id for s in specs]}
    if report.unsatisfied:
        extra["unsatisfied"] = list(report.unsatisfied)
    return _finish(rt, "B", seed, cases, report, config, extra)


def generate_C(rt, n, config=None, seed=0):
    """Unguided suite of ``n`` cases: explorations under the trivially true spec."""
    config = config or GenerationConfig()
    universe = inputs_universe(rt, config)
    report = GenerationReport()
    cases, seen = [], set()
    j = 0
    while len(cases) < n and j < 20 * n + 20:
        job = derive_seed(seed, "C", j)
        for k, tr in enumerate(_pick_from_stream(rt, TRIVIAL, config, job, universe, report)):
            if len(cases) >= n:
                break
            case = concretize_trace(rt, tr, derive_seed(job, k), None, f"C-{j}-{k}",
                                    {"kind": "C", "seed": seed, "job": j})
            if case is None:
                continue
            if case.input_key() in seen:
                report.duplicates_dropped += 1
                continue
            seen.add(case.input_key())
            cases.append(case)
        j += 1
    return _finish(rt, "C", seed, cases, report, config)


def generate_D(rt, n, sanity=None, config=None, seed=0):
    """Model-free inputs: uniform draws that respect an input-only sanity spec.

    Each step draws uniformly among the inputs that do not violate the
    sanity monitor; a drawn sequence that does not end satisfied is redrawn.
    The model then supplies the expected outputs.
    """
    config = config or GenerationConfig()
    sanity = sanity or TRIVIAL
    check_spec(sanity, rt.in_ports)
    universe = inputs_universe(rt, config)
    mon = Monitor(sanity)
    rng = random.Random(derive_seed(seed, "D"))
    report = GenerationReport()
    cases, seen = [], set()
    attempts = 0
    while len(cases) < n and attempts < 50 * n + 50:
        attempts += 1
        length = rng.randint(config.len_min, config.len_max)
        m = mon.start
        inputs = []
        for _ in range(length):
            ok = []
            for u in universe:
                m2 = mon.step(m, {p: u.get(p, ABSENT) for p in rt.in_ports})
                if mon.status(m2) != VIOLATED:
                    ok.append((u, m2))
            if not ok:
                break
            u, m = ok[rng.randrange(len(ok))]
            inputs.append(u)
        if len(inputs) < length or mon.status(m) != SATISFIED:
            continue
        case = case_from_inputs(rt, inputs, f"D-{len(cases)}", {"kind": "D", "seed": seed})
        if case.input_key() in seen:
            report.duplicates_dropped += 1
            continue
        seen.add(case.input_key())
        cases.append(case)
    extra = {"sanity": sanity.id}
    return _finish(rt, "D", seed, cases, report, config, extra)

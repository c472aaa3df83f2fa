"""Running test cases against a SUT, verdicts and failure classes."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import MbtError, UncoveredValue
from ..model.values import ABSENT, Con, format_value, head


@dataclass(frozen=True)
class Mismatch:
    step: int
    channel: str  # "exception" when the SUT itself failed
    expected: object
    actual: object
    phase: tuple = ()  # control labels of the model before the step


@dataclass(frozen=True)
class Verdict:
    case_id: str
    passed: bool
    mismatch: Mismatch = None
    ticks: int = 0  # concrete ticks executed

    def signature(self):
        """(channel, expected head, actual head, model phase) of a failing verdict."""
        m = self.mismatch
        return (m.channel, head(m.expected), head(m.actual), ",".join(m.phase))

    def to_json(self):
        d = {"case_id": self.case_id, "pass": self.passed}
        if self.mismatch is not None:
            m = self.mismatch
            d["mismatch"] = {
                "step": m.step, "channel": m.channel,
                "expected": format_value(m.expected), "actual": format_value(m.actual),
                "phase": list(m.phase),
            }
        return d


def model_phases(model_rt, case):
    """Control labels of the model before each step of ``case``."""
    state = model_rt.initial_state()
    out = []
    for step in case.steps:
        out.append(model_rt.control_labels(state))
        state, _ = model_rt.step(state, step.inputs)
    return out


def run_test(sut, adapter, case, model_rt=None, phases=None):
    """Execute ``case`` tick by tick; stop at the first mismatch.

    Returns the verdict and the coverage events the SUT produced on the
    executed prefix.  The model phase in failure signatures comes from
    ``phases`` (as computed by ``model_phases``) or else from replaying the
    case on ``model_rt``; with neither it is empty.
    """
    if phases is None and model_rt is not None:
        phases = model_phases(model_rt, case)
    session = sut.open()
    ticks = 0
    mismatch = None
    try:
        for i, step in enumerate(case.steps):
            phase = phases[i] if phases is not None else ()
            concrete, settle = adapter.expand(step.inputs)
            try:
                outs = []
                for t in concrete:
                    ticks += 1
                    outs.append(session.tick(t))
            except MbtError as exc:
                mismatch = Mismatch(i, "exception", ABSENT, Con.make(type(exc).__name__), phase)
                break
            try:
                actual = adapter.abstract(outs, settle)
            except UncoveredValue as exc:
                mismatch = Mismatch(i, exc.channel, step.expected.get(exc.channel, ABSENT),
                                    exc.value, phase)
                break
            for ch in sorted(step.expected):
                exp, act = step.expected[ch], actual.get(ch, ABSENT)
                if not adapter.compare(ch, exp, act):
                    mismatch = Mismatch(i, ch, exp, act, phase)
                    break
            if mismatch is not None:
                break
    finally:
        session.close()
    return Verdict(case.id, mismatch is None, mismatch, ticks), frozenset(session.events)


def run_suite(sut, adapter, cases, model_rt=None):
    """Verdicts and per-case SUT coverage events for every case."""
    verdicts, events = [], {}
    for c in cases:
        v, ev = run_test(sut, adapter, c, model_rt)
        verdicts.append(v)
        events[c.id] = ev
    return verdicts, events


def classify(verdicts):
    """Failing verdicts grouped by signature; keys and members in a canonical order."""
    groups = {}
    for v in verdicts:
        if not v.passed:
            groups.setdefault(v.signature(), []).append(v)
    return {sig: sorted(vs, key=lambda v: v.case_id) for sig, vs in sorted(groups.items())}


def purity(classes, labels):
    """Mean majority-label fraction per class; ``labels`` maps case id to a ground-truth label."""
    if not classes:
        return 1.0
    fracs = []
    for members in classes.values():
        counts = {}
        for v in members:
            lab = labels.get(v.case_id)
            counts[lab] = counts.get(lab, 0) + 1
        fracs.append(max(counts.values()) / len(members))
    return sum(fracs) / len(fracs)


def write_verdicts(verdicts, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([v.to_json() for v in verdicts], fh, indent=2, ensure_ascii=False)
        fh.write("\n")

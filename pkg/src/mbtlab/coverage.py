"""Condition/decision coverage: universes, maps, ratios and reports.

The universe of a model is derived from syntax alone (see
``model.decisions``).  A map records, per decision and per atomic condition,
whether it has been seen true and seen false.  The ratio counts set flags
over ``2 * (|decisions| + |atoms|)``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import UniverseMismatch, UnknownId
from .model.decisions import model_sites, walk


@dataclass(frozen=True)
class Item:
    id: str
    kind: str  # "decision" | "atom"
    owner: str
    concrete: bool = False  # belongs to a component tagged ``concrete``


@dataclass(frozen=True)
class CoverageUniverse:
    items: tuple

    @property
    def ids(self):
        return [i.id for i in self.items]

    @property
    def decisions(self):
        return [i for i in self.items if i.kind == "decision"]

    @property
    def atoms(self):
        return [i for i in self.items if i.kind == "atom"]

    @property
    def target(self):
        return 2 * len(self.items)

    @property
    def hash(self):
        text = "\n".join(f"{i.kind} {i.id}" for i in self.items)
        return hashlib.sha256(text.encode()).hexdigest()

    def restrict(self, concrete):
        return CoverageUniverse(tuple(i for i in self.items if i.concrete == concrete))


def enumerate_universe(model):
    """Every decision and atom of the model, in a deterministic syntactic order."""
    concrete = {c.name for c in model.components if "concrete" in c.tags}
    items = []
    for owner, path, expr, is_guard in model_sites(model):
        comp = owner.split(".t")[0] if not owner.startswith("fun.") else None
        for kind, ident, *_ in walk(expr, owner, path, is_decision=is_guard):
            items.append(Item(ident, kind, owner, comp in concrete))
    return CoverageUniverse(tuple(items))


class CoverageMap:
    """Per-item flags (sawTrue, sawFalse) over a fixed universe."""

    def __init__(self, universe):
        self.universe = universe
        self._index = {i.id: n for n, i in enumerate(universe.items)}
        self.flags = [[False, False] for _ in universe.items]

    def record(self, ident, outcome):
        n = self._index.get(ident)
        if n is None:
            raise UnknownId(ident)
        self.flags[n][0 if outcome else 1] = True

    def record_all(self, events):
        for ident, outcome in events:
            self.record(ident, outcome)
        return self

    def copy(self):
        out = CoverageMap(self.universe)
        out.flags = [list(f) for f in self.flags]
        return out

    def covered(self):
        return sum(a + b for a, b in self.flags)

    def events(self):
        out = set()
        for item, (t, f) in zip(self.universe.items, self.flags):
            if t:
                out.add((item.id, True))
            if f:
                out.add((item.id, False))
        return out

    def restrict(self, concrete):
        sub = self.universe.restrict(concrete)
        out = CoverageMap(sub)
        for n, item in enumerate(self.universe.items):
            if item.concrete == concrete:
                out.flags[out._index[item.id]] = list(self.flags[n])
        return out

    def __eq__(self, other):
        return (isinstance(other, CoverageMap) and self.universe.hash == other.universe.hash
                and self.flags == other.flags)

    def to_json(self):
        return {
            "universe_hash": self.universe.hash,
            "items": [
                {"id": i.id, "kind": i.kind, "sawTrue": t, "sawFalse": f}
                for i, (t, f) in zip(self.universe.items, self.flags)
            ],
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "kind", "owner", "concrete", "sawTrue", "sawFalse"])
        for i, (t, f) in zip(self.universe.items, self.flags):
            w.writerow([i.id, i.kind, i.owner, int(i.concrete), int(t), int(f)])
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def cd_ratio(cmap, universe=None):
    universe = universe or cmap.universe
    if universe.target == 0:
        return Fraction(0)
    return Fraction(cmap.covered(), universe.target)


def merge(a, b):
    if a.universe.hash != b.universe.hash:
        raise UniverseMismatch("coverage maps over different universes")
    out = a.copy()
    for fa, fb in zip(out.flags, b.flags):
        fa[0] |= fb[0]
        fa[1] |= fb[1]
    return out


def case_events(rt, case, steps=None):
    """Coverage events of running a case's inputs on an instrumented runtime."""
    events = set()
    state = rt.initial_state()
    for s in case.steps if steps is None else case.steps[:steps]:
        state, _ = rt.step(state, s.inputs, cov=events)
    return events


def suite_coverage(rt, universe, cases, cache=None):
    """Cumulative coverage map of ``cases`` on the instrumented runtime ``rt``."""
    cmap = CoverageMap(universe)
    for c in cases:
        ev = cache.get(c.id) if cache is not None else None
        if ev is None:
            ev = case_events(rt, c)
            if cache is not None:
                cache[c.id] = ev
        cmap.record_all(ev)
    return cmap

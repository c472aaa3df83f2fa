"""Set-based symbolic stepping and the visited-state store.

A symbolic state keeps a finite set of candidate values for every local
variable and every delayed-channel buffer, next to the vector of control
states.  ``sym_step`` enumerates the concrete states and inputs it stands for,
runs the engine on each combination and groups the results.  A value
survives into a successor exactly when some concrete combination with it
takes that successor, so the result is exact for the finite universe.

Grouping:

* ``"choice"`` groups by the transition choice vector (and monitor state);
  per-variable sets of a group are the union over its members.
* ``"exact"`` additionally groups by the concrete successor state, so only
  the input sets are non-singleton and every member input leads to the same
  state.  Test generation uses this mode; concretizing it is trivial.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..model.engine import SystemState
from ..model.values import ABSENT, value_key


@dataclass(frozen=True)
class SymState:
    control: tuple
    locals: tuple  # per atomic instance: tuple of frozensets
    buffers: tuple  # per delayed channel: frozenset

    def vector(self):
        """Flat tuple of every value set, in a fixed order."""
        out = [s for loc in self.locals for s in loc]
        out.extend(self.buffers)
        return tuple(out)

    def concrete_states(self):
        shape = [len(loc) for loc in self.locals]
        pools = [sorted(s, key=value_key) for s in self.vector()]
        for combo in product(*pools):
            locs, i = [], 0
            for n in shape:
                locs.append(tuple(combo[i:i + n]))
                i += n
            yield SystemState(self.control, tuple(locs), (), tuple(combo[i:]))

    def is_concrete(self):
        return all(len(s) == 1 for s in self.vector())

    @staticmethod
    def of(state):
        return SymState(
            state.control,
            tuple(tuple(frozenset((v,)) for v in loc) for loc in state.locals),
            tuple(frozenset((v,)) for v in state.buffers),
        )


@dataclass(frozen=True)
class SymSucc:
    """One successor group of a symbolic step."""

    choices: tuple
    state: SymState
    inputs: tuple  # (port, frozenset of values) per open in-port
    outputs: tuple  # (port, frozenset of values) per open out-port
    monitor: object = None
    concrete: object = None  # successor SystemState in exact mode

    def input_sets(self):
        return dict(self.inputs)


class _Acc:
    __slots__ = ("vec", "inputs", "outputs", "concrete")

    def __init__(self, n_vec, in_ports, out_ports):
        self.vec = [set() for _ in range(n_vec)]
        self.inputs = {p: set() for p in in_ports}
        self.outputs = {p: set() for p in out_ports}
        self.concrete = None


def _observed(rt, inputs, new, outputs):
    obs = {n: inputs.get(n, ABSENT) for n in rt.in_ports}
    obs.update(outputs)
    obs.update(zip(rt.channel_names, new.channels))
    return obs


def sym_step(rt, sym, inputs_universe, monitor=None, mstate=None, grouping="choice",
             cov=None):
    """Successor groups of ``sym`` over every input valuation of the universe."""
    groups = {}
    order = []
    shape = [len(loc) for loc in sym.locals]
    n_vec = sum(shape) + len(sym.buffers)
    for state in sym.concrete_states():
        for inp in inputs_universe:
            for choices, new, outputs in rt.successors(state, inp, cov):
                m2 = None
                if monitor is not None:
                    m2 = monitor.step(mstate, _observed(rt, inp, new, outputs))
                key = (choices, m2) if grouping == "choice" else (choices, new.key(), m2)
                acc = groups.get(key)
                if acc is None:
                    acc = groups[key] = _Acc(n_vec, rt.in_ports, rt.out_ports)
                    acc.concrete = new
                    order.append(key)
                i = 0
                for loc in new.locals:
                    for v in loc:
                        acc.vec[i].add(v)
                        i += 1
                for v in new.buffers:
                    acc.vec[i].add(v)
                    i += 1
                for p in rt.in_ports:
                    acc.inputs[p].add(inp.get(p, ABSENT))
                for p, v in outputs.items():
                    acc.outputs[p].add(v)
    out = []
    for key in order:
        acc = groups[key]
        vec = [frozenset(s) for s in acc.vec]
        locs, i = [], 0
        for n in shape:
            locs.append(tuple(vec[i:i + n]))
            i += n
        control = acc.concrete.control
        nsym = SymState(control, tuple(locs), tuple(vec[i:]))
        out.append(
            SymSucc(
                key[0],
                nsym,
                tuple((p, frozenset(acc.inputs[p])) for p in rt.in_ports),
                tuple((p, frozenset(acc.outputs[p])) for p in rt.out_ports),
                key[-1],
                acc.concrete if grouping == "exact" else None,
            )
        )
    return out


class StateStore:
    """Visited symbolic states, keyed by control vector (plus any extra key).

    An entry covers a new state when every value set of the new state is a
    subset of the entry's set and the entry was reached no deeper, so that
    its explored subtree had at least as much remaining length.  Stored
    entries stay maximal: inserting a state evicts the entries it covers.
    """

    def __init__(self):
        self._exact = {}  # key -> {vector of values: depth}
        self._general = {}  # key -> list of (vector of frozensets, depth)
        self.pruned = 0

    def __len__(self):
        return sum(len(v) for v in self._exact.values()) + sum(
            len(v) for v in self._general.values()
        )

    def entries(self, key):
        out = [(tuple(frozenset((x,)) for x in vec), d)
               for vec, d in self._exact.get(key, {}).items()]
        out.extend(self._general.get(key, []))
        return out

    def subsumed(self, sym, depth=0, extra=None):
        """True if ``sym`` is covered; otherwise insert it and return False."""
        key = (sym.control, extra)
        vec = sym.vector()
        exact = self._exact.setdefault(key, {})
        general = self._general.setdefault(key, [])
        singleton = all(len(s) == 1 for s in vec)
        flat = tuple(next(iter(s)) for s in vec) if singleton else None
        if singleton:
            d = exact.get(flat)
            if d is not None and d <= depth:
                self.pruned += 1
                return True
        for gvec, d in general:
            if d <= depth and all(a <= b for a, b in zip(vec, gvec)):
                self.pruned += 1
                return True
        # insert, evicting what the new entry covers
        if singleton:
            exact[flat] = depth
        else:
            for fvec in [f for f, d in exact.items()
                         if d >= depth and all(x in s for x, s in zip(f, vec))]:
                del exact[fvec]
            general[:] = [(g, d) for g, d in general
                          if not (d >= depth and all(a <= b for a, b in zip(g, vec)))]
            general.append((vec, depth))
        return False


def reachable_controls(rt, inputs_universe, bound, prune=True, grouping="choice"):
    """Control vectors reached by symbolic depth-first search up to ``bound`` steps."""
    store = StateStore() if prune else None
    start = SymState.of(rt.initial_state())
    seen = {start.control}
    stack = [(start, 0)]
    while stack:
        sym, depth = stack.pop()
        if store is not None and store.subsumed(sym, depth):
            continue
        if depth == bound:
            continue
        for succ in sym_step(rt, sym, inputs_universe, grouping=grouping):
            seen.add(succ.state.control)
            stack.append((succ.state, depth + 1))
    return seen

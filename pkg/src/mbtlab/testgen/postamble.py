"""Observation postambles: a scripted registry download appended to a test body."""

from __future__ import annotations

from collections import Counter
from dataclasses import replace

from ..errors import ObservationChannelMissing
from ..model.evaluator import evaluate
from ..model.types import Signature, list_items
from ..model.values import ABSENT, Con
from ..suite import Step

MIN_LEN = 3
MAX_LEN = 12


def _registry(rt, state):
    o = rt.model.observe
    path, _, local = o.registry.rpartition(".")
    value = rt.local(state, path, local)
    atom = next(a for a in rt.atomics if a.path == path)
    ltype = next(l.type for l in atom.component.efsm.locals if l.name == local)
    shape = Signature(rt.model).list_shape(ltype)
    return value, shape


def registry_items(rt, state):
    value, shape = _registry(rt, state)
    return list_items(value, shape)


def observation_script(rt, state):
    """Input valuations of the download dialogue for the registry held in ``state``.

    One query, then one "next" per chunk of entries plus one that ends the
    download, then an idle tick: ``3 + ceil(k / chunk)`` ticks, at most 12.
    """
    o = rt.model.observe
    if o is None:
        raise ObservationChannelMissing("model declares no observe block")
    k = len(registry_items(rt, state))
    chunks = -(-k // o.chunk)
    length = max(MIN_LEN, min(MIN_LEN + chunks, MAX_LEN))
    query = evaluate(o.query, {}, rt.model)
    nxt = evaluate(o.next, {}, rt.model)
    script = [{o.query_port: query}]
    script += [{o.next_port: nxt} for _ in range(length - 2)]
    script.append({})
    return [_total(rt, s) for s in script]


def _total(rt, inputs):
    return {p: inputs.get(p, ABSENT) for p in rt.in_ports}


def add_postamble(case, rt):
    """``case`` with the observation postamble appended (expected outputs by strict run)."""
    state = rt.initial_state()
    for s in case.body:
        state, _ = rt.step(state, s.inputs)
    script = observation_script(rt, state)
    extra = []
    for inp in script:
        state, out = rt.step(state, inp)
        extra.append(Step(inp, out))
    return replace(case, steps=tuple(case.body) + tuple(extra), postamble_length=len(extra))


def dumped_entries(rt, values):
    """Registry entries carried by list-valued arguments of response values."""
    _, shape = _registry(rt, rt.initial_state())
    nil, cons, _ = shape
    out = []
    for v in values:
        if not isinstance(v, Con):
            continue
        for a in v[1:]:
            if isinstance(a, Con) and a[0] in (nil, cons):
                out.extend(list_items(a, shape))
    return out


def check_postamble(case, rt):
    """True iff the postamble is well formed and its dump equals the registry.

    The body is replayed to obtain the model registry; the postamble must be
    the scripted dialogue, its expected outputs must be the strict-mode
    outputs, and the entries dumped on the response port must equal the
    registry contents as a multiset.
    """
    if not MIN_LEN <= case.postamble_length <= MAX_LEN:
        return False
    state = rt.initial_state()
    for s in case.body:
        state, _ = rt.step(state, s.inputs)
    registry = registry_items(rt, state)
    script = observation_script(rt, state)
    if [s.inputs for s in case.postamble] != script:
        return False
    seen = []
    for s in case.postamble:
        state, out = rt.step(state, s.inputs)
        if out != s.expected:
            return False
        seen.append(out[rt.model.observe.response])
    return Counter(dumped_entries(rt, seen)) == Counter(registry)

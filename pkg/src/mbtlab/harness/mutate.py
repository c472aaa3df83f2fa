"""Single-edit mutants of a model, used as seeded faults.

Every operator enumerates its applicable locations in a fixed syntactic
order; the seed picks one uniformly.  A mutant is flagged equivalent when
it produces the same concrete outputs as the base on a probe of input
sequences.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace

from ..errors import ConfigError, MbtError, OperatorInapplicable
from ..model import syntax as S
from ..model.engine import Runtime
from ..model.validate import validate_model
from ..suite import model_hash

OPERATORS = ("GuardNegate", "ConstantReplace", "TransitionRetarget", "OutputSwap", "AssignmentDrop")


@dataclass(frozen=True)
class Mutant:
    id: str
    operator: str
    location: str
    seed: int
    model: S.Model
    base_hash: str
    equivalent: bool = None  # None until probed

    def to_json(self):
        d = {"id": self.id, "operator": self.operator, "location": self.location,
             "seed": self.seed}
        if self.equivalent is not None:
            d["equivalent"] = self.equivalent
        return d


# -- expression surgery -------------------------------------------------------


def _with_children(e, kids):
    if isinstance(e, (S.ConApp, S.Call)):
        return replace(e, args=tuple(kids))
    if isinstance(e, S.Case):
        arms = tuple((p, k) for (p, _), k in zip(e.arms, kids[1:]))
        return replace(e, scrutinee=kids[0], arms=arms)
    if isinstance(e, S.If):
        return replace(e, cond=kids[0], then=kids[1], orelse=kids[2])
    if isinstance(e, S.Unary):
        return replace(e, operand=kids[0])
    if isinstance(e, S.Binary):
        return replace(e, left=kids[0], right=kids[1])
    return e


def _literals(e, path=()):
    if isinstance(e, S.Lit):
        yield path, e
    for i, c in enumerate(S.children(e)):
        yield from _literals(c, path + (i,))


def _replace_at(e, path, new):
    if not path:
        return new
    kids = list(S.children(e))
    kids[path[0]] = _replace_at(kids[path[0]], path[1:], new)
    return _with_children(e, kids)


def _mutated_literal(lit):
    if isinstance(lit.value, bool):
        return S.Lit(not lit.value)
    return S.Lit(lit.value + 1)


# -- locations ----------------------------------------------------------------


def _set_transition(model, comp_name, index, new_t):
    comps = []
    for c in model.components:
        if c.name == comp_name:
            ts = list(c.efsm.transitions)
            ts[index] = new_t
            c = replace(c, efsm=replace(c.efsm, transitions=tuple(ts)))
        comps.append(c)
    return replace(model, components=tuple(comps))


def _set_function(model, name, body):
    funs = tuple(replace(f, body=body) if f.name == name else f for f in model.functions)
    return replace(model, functions=funs)


def _transitions(model):
    for c in model.components:
        if c.efsm is not None:
            for i, t in enumerate(c.efsm.transitions):
                yield c, i, t


def _expr_sites(model):
    """(location, expression, setter) for every expression a mutation may touch."""
    for f in model.functions:
        yield f"fun.{f.name}", f.body, (lambda m, e, n=f.name: _set_function(m, n, e))
    for c, i, t in _transitions(model):
        base = f"{c.name}.t{i}"
        if t.guard is not None:
            yield f"{base}.guard", t.guard, (
                lambda m, e, c=c.name, i=i, t=t: _set_transition(m, c, i, replace(t, guard=e)))
        for k, (port, e0) in enumerate(t.outputs):
            def set_out(m, e, c=c.name, i=i, t=t, k=k, port=port):
                outs = list(t.outputs)
                outs[k] = (port, e)
                return _set_transition(m, c, i, replace(t, outputs=tuple(outs)))
            yield f"{base}.out.{port}", e0, set_out
        for k, (name, e0) in enumerate(t.assigns):
            def set_asg(m, e, c=c.name, i=i, t=t, k=k, name=name):
                asg = list(t.assigns)
                asg[k] = (name, e)
                return _set_transition(m, c, i, replace(t, assigns=tuple(asg)))
            yield f"{base}.set.{name}", e0, set_asg


def locations(model, operator):
    """Applicable (location, apply) pairs of ``operator`` in syntactic order."""
    out = []
    if operator == "GuardNegate":
        for c, i, t in _transitions(model):
            if t.guard is not None:
                new = replace(t, guard=S.Unary("!", t.guard))
                out.append((f"{c.name}.t{i}.guard",
                            lambda m, c=c.name, i=i, new=new: _set_transition(m, c, i, new)))
    elif operator == "ConstantReplace":
        for loc, e, setter in _expr_sites(model):
            for path, lit in _literals(e):
                new = _replace_at(e, path, _mutated_literal(lit))
                where = loc + ("@" + ".".join(map(str, path)) if path else "")
                out.append((f"{where}={lit.value}", lambda m, s=setter, new=new: s(m, new)))
    elif operator == "TransitionRetarget":
        for c, i, t in _transitions(model):
            for st in c.efsm.states:
                if st != t.dst:
                    new = replace(t, dst=st)
                    out.append((f"{c.name}.t{i}.dst={st}",
                                lambda m, c=c.name, i=i, new=new: _set_transition(m, c, i, new)))
    elif operator == "OutputSwap":
        for c, i, t in _transitions(model):
            for k, (port, e) in enumerate(t.outputs):
                donors = []
                for j, u in enumerate(c.efsm.transitions):
                    for port2, e2 in u.outputs:
                        if j != i and port2 == port and e2 != e and e2 not in donors:
                            donors.append(e2)
                for d, e2 in enumerate(donors):
                    outs = list(t.outputs)
                    outs[k] = (port, e2)
                    new = replace(t, outputs=tuple(outs))
                    out.append((f"{c.name}.t{i}.out.{port}#{d}",
                                lambda m, c=c.name, i=i, new=new: _set_transition(m, c, i, new)))
    elif operator == "AssignmentDrop":
        for c, i, t in _transitions(model):
            for k, (name, _) in enumerate(t.assigns):
                new = replace(t, assigns=t.assigns[:k] + t.assigns[k + 1:])
                out.append((f"{c.name}.t{i}.set.{name}",
                            lambda m, c=c.name, i=i, new=new: _set_transition(m, c, i, new)))
    else:
        raise ConfigError(f"unknown mutation operator {operator}")
    return out


_CANDIDATES = {}


def _candidates(base, operator):
    key = (model_hash(base), operator)
    if key not in _CANDIDATES:
        found = []
        for loc, apply in locations(base, operator):
            m = apply(base)
            if not validate_model(m):
                found.append((loc, m))
        _CANDIDATES[key] = found
    return _CANDIDATES[key]


def mutate(base, operator, seed, mutant_id=None):
    """A seeded single-edit mutant; only locations whose result validates are candidates."""
    candidates = _candidates(base, operator)
    if not candidates:
        raise OperatorInapplicable(f"{operator} has no applicable location")
    loc, m = candidates[random.Random(f"{operator}/{seed}").randrange(len(candidates))]
    return Mutant(mutant_id or f"{operator}-{seed}", operator, loc, seed, m, model_hash(base))


# -- equivalence probing ------------------------------------------------------


def probe_ticks(adapter, cases):
    """Concrete input ticks of each case, for equivalence probing."""
    return [[t for s in c.steps for t in adapter.concretize(s.inputs)] for c in cases]


def _behaviour(rt, ticks):
    state = rt.initial_state()
    out = []
    try:
        for t in ticks:
            state, o = rt.step(state, t)
            out.append(o)
    except MbtError as exc:
        out.append(type(exc).__name__)
    return out


def is_equivalent(base, mutant_model, probe):
    """True iff base and mutant produce identical outputs on every probe sequence."""
    rb, rm = Runtime(base), Runtime(mutant_model)
    return all(_behaviour(rb, ts) == _behaviour(rm, ts) for ts in probe)


def mutant_set(base, probe, per_operator=4, max_seed=200, operators=OPERATORS):
    """The first ``per_operator`` non-equivalent, distinct mutants per operator by seed."""
    out = []
    for op in operators:
        seen, picked = set(), 0
        for seed in range(max_seed):
            if picked >= per_operator:
                break
            mut = mutate(base, op, seed)
            if mut.location in seen:
                continue
            seen.add(mut.location)
            if is_equivalent(base, mut.model, probe):
                continue
            picked += 1
            out.append(replace(mut, id=f"M{len(out) + 1:02d}", equivalent=False))
    return out


def manifest(mutants, base):
    return {"base_hash": model_hash(base), "mutants": [m.to_json() for m in mutants]}


def write_manifest(mutants, base, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest(mutants, base), fh, indent=2)
        fh.write("\n")


def load_manifest(doc, base):
    """Rebuild the mutants listed in a manifest document against ``base``."""
    if doc.get("base_hash") != model_hash(base):
        raise ConfigError("mutant manifest was built for a different base model")
    out = []
    for d in doc["mutants"]:
        mut = mutate(base, d["operator"], d["seed"], d["id"])
        if mut.location != d["location"]:
            raise ConfigError(f"mutant {d['id']} no longer lands on {d['location']}")
        out.append(replace(mut, equivalent=d.get("equivalent")))
    return out


def read_manifest(path, base):
    with open(path, encoding="utf-8") as fh:
        return load_manifest(json.load(fh), base)


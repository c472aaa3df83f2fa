"""Static checks on a parsed model.

``validate_model`` never raises; it returns every problem it finds as a
``Diagnostic``.  An empty list means the model can be executed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import EvalError, InvalidModel
from . import syntax as S
from .network import flatten
from .types import Signature, has_type


@dataclass(frozen=True)
class Diagnostic:
    location: object
    message: str
    code: str = "error"

    def __str__(self):
        where = f"{self.location}: " if self.location is not None else ""
        return f"{where}{self.message}"


class _Checker:
    def __init__(self, model):
        self.model = model
        self.sig = Signature(model)
        self.out = []

    def diag(self, loc, message, code="error"):
        self.out.append(Diagnostic(loc, message, code))

    def type_ref(self, name, loc):
        if not self.sig.known_type(name):
            self.diag(loc, f"unknown type {name}", "unknown-type")
            return False
        return True

    # -- declarations ------------------------------------------------------

    def check_types(self):
        seen_types = Counter(t.name for t in self.model.types)
        seen_cons = Counter(c.name for t in self.model.types for c in t.constructors)
        for t in self.model.types:
            if t.name in S.BUILTIN_TYPES or seen_types[t.name] > 1:
                self.diag(t.loc, f"type {t.name} declared more than once", "duplicate")
            for c in t.constructors:
                if seen_cons[c.name] > 1:
                    self.diag(c.loc, f"constructor {c.name} declared more than once", "duplicate")
                    seen_cons[c.name] = 1  # report once
                for a in c.args:
                    self.type_ref(a, c.loc)
        for t in self.model.types:
            if not self._inhabited(t.name, set()):
                self.diag(t.loc, f"type {t.name} has no finite values", "empty-type")

    def _inhabited(self, tname, visiting):
        if tname in S.BUILTIN_TYPES:
            return True
        t = self.sig.types.get(tname)
        if t is None or tname in visiting:
            return False
        return any(
            all(self._inhabited(a, visiting | {tname}) for a in c.args) for c in t.constructors
        )

    def check_functions(self):
        counts = Counter(f.name for f in self.model.functions)
        for f in self.model.functions:
            if counts[f.name] > 1:
                self.diag(f.loc, f"function {f.name} declared more than once", "duplicate")
            if f.name in self.sig.cons:
                self.diag(f.loc, f"function {f.name} clashes with a constructor", "duplicate")
            env = {}
            for n, ty in f.params:
                self.type_ref(ty, f.loc)
                if n in env:
                    self.diag(f.loc, f"parameter {n} repeated in {f.name}", "duplicate")
                env[n] = ty
            self.type_ref(f.result, f.loc)
            got = self.expr(f.body, env)
            if got is not None and got != f.result:
                self.diag(f.body.loc or f.loc,
                          f"{f.name} returns {got} but is declared {f.result}", "type")

    def check_components(self):
        counts = Counter(c.name for c in self.model.components)
        comps = {c.name: c for c in self.model.components}
        for c in self.model.components:
            if counts[c.name] > 1:
                self.diag(c.loc, f"component {c.name} declared more than once", "duplicate")
            pnames = Counter(p.name for p in c.ports)
            for p in c.ports:
                self.type_ref(p.type, p.loc)
                if pnames[p.name] > 1:
                    self.diag(p.loc, f"port {p.name} declared more than once", "duplicate")
            if c.efsm is not None:
                if c.subs or c.channels:
                    self.diag(c.loc, f"component {c.name} has both an efsm and subcomponents",
                              "structure")
                self.check_efsm(c)
            else:
                self.check_network(c, comps)
        if self.model.components and self.model.root() is None:
            self.diag(None, "model has no unique root component", "structure")

    def check_network(self, c, comps):
        subs = {}
        for s in c.subs:
            if s.name in subs:
                self.diag(s.loc, f"instance {s.name} declared more than once", "duplicate")
            if s.component not in comps:
                self.diag(s.loc, f"unknown component {s.component}", "unknown-name")
            subs[s.name] = comps.get(s.component)
        incoming = Counter()
        names = Counter(ch.name for ch in c.channels)
        for ch in c.channels:
            if names[ch.name] > 1:
                self.diag(ch.loc, f"channel {ch.name} declared more than once", "duplicate")
            src = self.endpoint(c, subs, ch.src, "out", ch.loc)
            dst = self.endpoint(c, subs, ch.dst, "in", ch.loc)
            if src is not None and dst is not None and src.type != dst.type:
                self.diag(ch.loc, f"channel {ch.name} connects {src.type} to {dst.type}",
                          "type-mismatch")
            incoming[str(ch.dst)] += 1
            if incoming[str(ch.dst)] == 2:
                self.diag(ch.loc, f"port {ch.dst} has more than one incoming channel",
                          "structure")

    def endpoint(self, c, subs, ep, role, loc):
        # a channel reads from an out-port of a sub or an in-port of the enclosing
        # component, and writes to an in-port of a sub or an out-port of the enclosing one
        if ep.inst is None:
            owner = c
            want = "in" if role == "out" else "out"
        else:
            if ep.inst not in subs:
                self.diag(loc, f"unknown instance {ep.inst}", "unknown-name")
                return None
            owner = subs[ep.inst]
            want = role
            if owner is None:
                return None
        p = owner.port(ep.port)
        if p is None:
            self.diag(loc, f"unknown port {ep}", "unknown-name")
            return None
        if p.direction != want:
            self.diag(loc, f"port {ep} has the wrong direction for this channel end", "direction")
        return p

    def check_efsm(self, c):
        e = c.efsm
        states = Counter(e.states)
        for s, n in states.items():
            if n > 1:
                self.diag(e.loc, f"state {s} declared more than once", "duplicate")
        if e.init not in states:
            self.diag(e.loc, f"initial state {e.init} is not declared", "unknown-name")
        local_types = {}
        for l in e.locals:
            if l.name in local_types:
                self.diag(l.loc, f"local {l.name} declared more than once", "duplicate")
            self.type_ref(l.type, l.loc)
            local_types[l.name] = l.type
            got = self.expr(l.init, {})
            if got is not None and got != l.type:
                self.diag(l.loc, f"local {l.name} initialised with {got}", "type")
            elif got is not None:
                self.const_value(l)
        ports = {p.name: p for p in c.ports}
        for i, t in enumerate(e.transitions):
            loc = t.loc or e.loc
            for s in (t.src, t.dst):
                if s not in states:
                    self.diag(loc, f"unknown state {s}", "unknown-name")
            env = dict(local_types)
            binders = []
            seen_ports = set()
            for pname, pat in t.inputs:
                p = ports.get(pname)
                if pname in seen_ports:
                    self.diag(loc, f"input port {pname} matched twice", "duplicate")
                seen_ports.add(pname)
                if p is None or p.direction != "in":
                    self.diag(loc, f"{pname} is not an input port of {c.name}", "unknown-name")
                    continue
                self.pattern(pat, p.type, env, binders, loc, top=True)
            dup = [b for b, n in Counter(binders).items() if n > 1]
            for b in dup:
                self.diag(loc, f"binder {b} used more than once", "nonlinear")
            if t.guard is not None:
                got = self.expr(t.guard, env)
                if got is not None and got != "Bool":
                    self.diag(loc, f"guard has type {got}, expected Bool", "type")
            outs = Counter()
            for pname, x in t.outputs:
                outs[pname] += 1
                p = ports.get(pname)
                if p is None or p.direction != "out":
                    self.diag(loc, f"{pname} is not an output port of {c.name}", "unknown-name")
                    continue
                got = self.expr(x, env)
                if got is not None and got != p.type:
                    self.diag(loc, f"output on {pname} has type {got}, expected {p.type}", "type")
            for pname, n in outs.items():
                if n > 1:
                    self.diag(loc, f"output port {pname} written twice", "duplicate")
            sets = Counter()
            for lname, x in t.assigns:
                sets[lname] += 1
                if lname not in local_types:
                    self.diag(loc, f"unknown local {lname}", "unknown-name")
                    continue
                got = self.expr(x, env)
                if got is not None and got != local_types[lname]:
                    self.diag(loc, f"assignment to {lname} has type {got}", "type")
            for lname, n in sets.items():
                if n > 1:
                    self.diag(loc, f"local {lname} assigned twice", "duplicate")

    def const_value(self, l):
        from .evaluator import evaluate

        try:
            v = evaluate(l.init, {}, self.model.functions, fuel=10_000)
        except (EvalError, RecursionError) as exc:
            self.diag(l.loc, f"initial value of {l.name} does not evaluate: {exc}", "type")
            return
        if not has_type(v, l.type, self.sig):
            self.diag(l.loc, f"initial value of {l.name} is not a {l.type}", "type")

    # -- patterns and expressions -------------------------------------------

    def pattern(self, p, tname, env, binders, loc, top=False):
        loc = p.loc or loc
        if isinstance(p, S.PWild):
            return
        if isinstance(p, S.PAbsent):
            if not top:
                self.diag(loc, "absent pattern inside a constructor pattern", "type")
            return
        if isinstance(p, S.PVar):
            binders.append(p.name)
            env[p.name] = tname
            return
        if isinstance(p, S.PLit):
            kind = "Bool" if isinstance(p.value, bool) else "Int"
            if kind != tname:
                self.diag(loc, f"{kind} literal pattern against {tname}", "type")
            return
        entry = self.sig.cons.get(p.name)
        if entry is None:
            self.diag(loc, f"unknown constructor {p.name}", "unknown-name")
            return
        owner, args = entry
        if owner != tname:
            self.diag(loc, f"constructor {p.name} of {owner} used against {tname}", "type")
            return
        if len(args) != len(p.args):
            self.diag(loc, f"{p.name} expects {len(args)} arguments", "arity")
            return
        for sub, at in zip(p.args, args):
            self.pattern(sub, at, env, binders, loc)

    def expr(self, e, env):
        """Type of ``e`` under ``env`` or None after reporting a diagnostic."""
        loc = e.loc
        if isinstance(e, S.Lit):
            return "Bool" if isinstance(e.value, bool) else "Int"
        if isinstance(e, S.Var):
            if e.name not in env:
                self.diag(loc, f"unknown variable {e.name}", "unknown-name")
                return None
            return env[e.name]
        if isinstance(e, S.ConApp):
            entry = self.sig.cons.get(e.name)
            if entry is None:
                self.diag(loc, f"unknown constructor {e.name}", "unknown-name")
                return None
            owner, args = entry
            if len(args) != len(e.args):
                self.diag(loc, f"{e.name} expects {len(args)} arguments", "arity")
                return owner
            for a, at in zip(e.args, args):
                got = self.expr(a, env)
                if got is not None and got != at:
                    self.diag(a.loc or loc, f"argument of {e.name} has type {got}, expected {at}",
                              "type")
            return owner
        if isinstance(e, S.Call):
            f = self.sig.funcs.get(e.name)
            if f is None:
                self.diag(loc, f"unknown function {e.name}", "unknown-name")
                for a in e.args:
                    self.expr(a, env)
                return None
            if len(f.params) != len(e.args):
                self.diag(loc, f"{e.name} expects {len(f.params)} arguments", "arity")
                return f.result
            for a, (_, at) in zip(e.args, f.params):
                got = self.expr(a, env)
                if got is not None and got != at:
                    self.diag(a.loc or loc, f"argument of {e.name} has type {got}, expected {at}",
                              "type")
            return f.result
        if isinstance(e, S.If):
            c = self.expr(e.cond, env)
            if c is not None and c != "Bool":
                self.diag(e.cond.loc or loc, f"condition has type {c}, expected Bool", "type")
            return self.same(self.expr(e.then, env), self.expr(e.orelse, env), loc)
        if isinstance(e, S.Case):
            st = self.expr(e.scrutinee, env)
            result = None
            first = True
            for p, x in e.arms:
                inner = dict(env)
                binders = []
                if st is not None:
                    self.pattern(p, st, inner, binders, loc)
                else:
                    for b in S.pattern_binders(p):
                        inner[b] = None
                for b, n in Counter(binders).items():
                    if n > 1:
                        self.diag(p.loc or loc, f"binder {b} used more than once", "nonlinear")
                got = self.expr(x, inner)
                result = got if first else self.same(result, got, loc)
                first = False
            return result
        if isinstance(e, S.Unary):
            got = self.expr(e.operand, env)
            want = "Bool" if e.op == "!" else "Int"
            if got is not None and got != want:
                self.diag(loc, f"operator {e.op} applied to {got}", "type")
            return want
        if isinstance(e, S.Binary):
            l = self.expr(e.left, env)
            r = self.expr(e.right, env)
            if e.op in S.BOOL_OPS:
                want, res = "Bool", "Bool"
            elif e.op in ("==", "!="):
                self.same(l, r, loc)
                return "Bool"
            elif e.op in S.COMPARE_OPS:
                want, res = "Int", "Bool"
            else:
                want, res = "Int", "Int"
            for got in (l, r):
                if got is not None and got != want:
                    self.diag(loc, f"operator {e.op} applied to {got}", "type")
            return res
        self.diag(loc, f"unsupported expression {e!r}", "syntax")
        return None

    def same(self, a, b, loc):
        if a is not None and b is not None and a != b:
            self.diag(loc, f"branches have types {a} and {b}", "type")
            return None
        return a if a is not None else b

    # -- whole-network checks ----------------------------------------------

    def check_causality(self):
        if self.model.root() is None:
            return
        net = flatten(self.model)
        for msg, loc in net.problems:
            self.diag(loc, msg, "structure")
        if net.problems:
            return
        if net.cycle:
            self.diag(self.model.root().loc,
                      "zero-delay causality cycle through " + " -> ".join(net.cycle),
                      "causality-cycle")
        names = Counter(n for n, *_ in net.channels)
        names.update(n for n, _ in net.ext_inputs + net.ext_outputs)
        for n, k in names.items():
            if k > 1:
                self.diag(self.model.root().loc,
                          f"observable name {n} is used by more than one port or channel",
                          "duplicate")

    def check_observe(self):
        o = self.model.observe
        root = self.model.root()
        if o is None or root is None:
            return
        for pname, x in ((o.query_port, o.query), (o.next_port, o.next)):
            p = root.port(pname)
            if p is None or p.direction != "in":
                self.diag(o.loc, f"observe: {pname} is not an input of {root.name}", "observe")
                continue
            got = self.expr(x, {})
            if got is not None and got != p.type:
                self.diag(o.loc, f"observe: message for {pname} has type {got}", "observe")
        p = root.port(o.response)
        if p is None or p.direction != "out":
            self.diag(o.loc, f"observe: {o.response} is not an output of {root.name}", "observe")
        if o.chunk < 1:
            self.diag(o.loc, "observe: chunk must be positive", "observe")
        path, _, local = o.registry.rpartition(".")
        inst = next((i for i in flatten(self.model).atomic if i.path == path), None)
        if inst is None or all(l.name != local for l in inst.component.efsm.locals):
            self.diag(o.loc, f"observe: no registry local {o.registry}", "observe")
            return
        ltype = next(l.type for l in inst.component.efsm.locals if l.name == local)
        if self.sig.list_shape(ltype) is None:
            self.diag(o.loc, f"observe: registry {o.registry} is not a list type", "observe")


def validate_model(model):
    """All diagnostics for ``model``; empty iff it is well formed."""
    ch = _Checker(model)
    ch.check_types()
    ch.check_functions()
    ch.check_components()
    if not ch.out:
        ch.check_causality()
    if not ch.out:
        ch.check_observe()
    return ch.out


def ensure_valid(model):
    diags = validate_model(model)
    if diags:
        raise InvalidModel(diags)
    return model

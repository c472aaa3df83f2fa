"""Call-by-value evaluation of the guard/assignment language.

Expressions are compiled once into nested closures.  Each function call and
each case dispatch consumes one unit of fuel; calls in tail position are run
by a trampoline so unbounded tail recursion exhausts fuel rather than the
Python stack.  With ``instrument=True`` the compiled code records decision and
atom outcomes into ``ctx.cov`` (a set of ``(id, bool)`` pairs), honouring
short-circuit evaluation.
"""

from __future__ import annotations

from ..errors import EvalError, FuelExhausted, MatchFailure
from . import syntax as S
from .decisions import atom_id, atom_leaves, decision_id, function_owner
from .values import ABSENT, Con

DEFAULT_FUEL = 100_000


class Ctx:
    __slots__ = ("fuel", "budget", "cov")

    def __init__(self, budget=DEFAULT_FUEL, cov=None):
        self.budget = budget
        self.fuel = budget
        self.cov = cov

    def reset(self):
        self.fuel = self.budget


class _Tail:
    __slots__ = ("fn", "args")

    def __init__(self, fn, args):
        self.fn = fn
        self.args = args


class _Fn:
    __slots__ = ("name", "params", "body")

    def __init__(self, name, params):
        self.name = name
        self.params = params
        self.body = None


def _invoke(fn, args, ctx):
    while True:
        ctx.fuel -= 1
        if ctx.fuel < 0:
            raise FuelExhausted(ctx.budget)
        r = fn.body(dict(zip(fn.params, args)), ctx)
        if type(r) is _Tail:
            fn, args = r.fn, r.args
            continue
        return r


# -- patterns ----------------------------------------------------------------

_EMPTY = {}


def compile_pattern(p):
    """Return a matcher ``value -> dict of bindings | None``."""
    if isinstance(p, S.PWild):
        return lambda v: None if v is ABSENT else _EMPTY
    if isinstance(p, S.PAbsent):
        return lambda v: _EMPTY if v is ABSENT else None
    if isinstance(p, S.PVar):
        name = p.name
        return lambda v: None if v is ABSENT else {name: v}
    if isinstance(p, S.PLit):
        lit = p.value
        kind = type(lit)
        return lambda v: _EMPTY if type(v) is kind and v == lit else None
    if isinstance(p, S.PCon):
        name = p.name
        n = len(p.args) + 1
        subs = [compile_pattern(a) for a in p.args]
        if not subs:
            return lambda v: _EMPTY if type(v) is Con and v[0] == name else None

        def match_con(v):
            if type(v) is not Con or v[0] != name or len(v) != n:
                return None
            out = None
            for i, m in enumerate(subs, 1):
                b = m(v[i])
                if b is None:
                    return None
                if b:
                    if out is None:
                        out = dict(b)
                    else:
                        out.update(b)
            return out if out is not None else _EMPTY

        return match_con
    raise TypeError(f"not a pattern: {p!r}")


def match(pattern, value):
    """Bindings of ``pattern`` against ``value`` or None when it does not match."""
    b = compile_pattern(pattern)(value)
    return None if b is None else dict(b)


# -- expressions -------------------------------------------------------------


def _arith(op):
    if op == "+":
        return lambda a, b: a + b
    if op == "-":
        return lambda a, b: a - b
    if op == "*":
        return lambda a, b: a * b
    if op == "/":
        def div(a, b):
            if b == 0:
                raise EvalError("division by zero")
            return a // b
        return div
    if op == "%":
        def mod(a, b):
            if b == 0:
                raise EvalError("division by zero")
            return a % b
        return mod
    if op == "==":
        return lambda a, b: a == b
    if op == "!=":
        return lambda a, b: a != b
    if op == "<":
        return lambda a, b: a < b
    if op == "<=":
        return lambda a, b: a <= b
    if op == ">":
        return lambda a, b: a > b
    if op == ">=":
        return lambda a, b: a >= b
    raise ValueError(op)


class Evaluator:
    """Compiles expressions of one model; shared by all executions of it."""

    def __init__(self, functions=(), instrument=False):
        self.instrument = instrument
        self.fns = {}
        defs = list(functions)
        for f in defs:
            self.fns[f.name] = _Fn(f.name, tuple(n for n, _ in f.params))
        for f in defs:
            self.fns[f.name].body = self._compile(
                f.body, function_owner(f.name), "b", tail=True, decision=False
            )

    def compile(self, expr, owner="expr", path="e", decision=False):
        return self._compile(expr, owner, path, tail=False, decision=decision)

    # The owner/path arguments mirror decisions.walk so instrumented ids agree.
    def _compile(self, e, owner, path, tail, decision):
        if self.instrument and (decision or S.is_bool_op(e)):
            return self._compile_decision(e, owner, path)
        return self._compile_plain(e, owner, path, tail)

    def _compile_decision(self, e, owner, path):
        did = decision_id(owner, path)
        if S.is_bool_op(e):
            inner = self._compile_tree(e, owner, path)
        else:
            inner = self._atom(e, owner, path)

        def decide(env, ctx):
            v = inner(env, ctx)
            ctx.cov.add((did, v))
            return v

        return decide

    def _atom(self, e, owner, path):
        aid = atom_id(owner, path)
        leaf = self._compile_plain(e, owner, path, tail=False)

        def atom(env, ctx):
            v = leaf(env, ctx)
            ctx.cov.add((aid, v))
            return v

        return atom

    def _compile_tree(self, e, owner, path):
        if S.is_bool_op(e):
            if isinstance(e, S.Unary):
                x = self._compile_tree(e.operand, owner, f"{path}.0")
                return lambda env, ctx: not x(env, ctx)
            l = self._compile_tree(e.left, owner, f"{path}.0")
            r = self._compile_tree(e.right, owner, f"{path}.1")
            if e.op == "&&":
                return lambda env, ctx: l(env, ctx) and r(env, ctx)
            return lambda env, ctx: l(env, ctx) or r(env, ctx)
        return self._atom(e, owner, path)

    def _compile_plain(self, e, owner, path, tail):
        sub = lambda x, i, t=False: self._compile(x, owner, f"{path}.{i}", t, False)  # noqa: E731

        if isinstance(e, S.Lit):
            v = e.value
            return lambda env, ctx: v
        if isinstance(e, S.Var):
            name = e.name

            def var(env, ctx):
                try:
                    return env[name]
                except KeyError:
                    raise EvalError(f"unbound variable {name}") from None

            return var
        if isinstance(e, S.ConApp):
            if not e.args:
                c = Con.make(e.name)
                return lambda env, ctx: c
            name = e.name
            args = [sub(a, i) for i, a in enumerate(e.args)]
            if len(args) == 1:
                a0 = args[0]
                return lambda env, ctx: Con((name, a0(env, ctx)))
            if len(args) == 2:
                a0, a1 = args
                return lambda env, ctx: Con((name, a0(env, ctx), a1(env, ctx)))
            return lambda env, ctx: Con((name, *[a(env, ctx) for a in args]))
        if isinstance(e, S.Call):
            fn = self.fns.get(e.name)
            if fn is None:
                raise EvalError(f"unknown function {e.name}")
            if len(e.args) != len(fn.params):
                raise EvalError(f"{e.name} expects {len(fn.params)} arguments")
            args = [sub(a, i) for i, a in enumerate(e.args)]
            if tail:
                return lambda env, ctx: _Tail(fn, [a(env, ctx) for a in args])
            return lambda env, ctx: _invoke(fn, [a(env, ctx) for a in args], ctx)
        if isinstance(e, S.If):
            c = self._compile(e.cond, owner, f"{path}.0", False, True)
            t = sub(e.then, 1, tail)
            f = sub(e.orelse, 2, tail)
            return lambda env, ctx: t(env, ctx) if c(env, ctx) else f(env, ctx)
        if isinstance(e, S.Case):
            scrut = sub(e.scrutinee, 0)
            arms = [
                (compile_pattern(p), sub(x, i + 1, tail)) for i, (p, x) in enumerate(e.arms)
            ]

            def case(env, ctx):
                v = scrut(env, ctx)
                ctx.fuel -= 1
                if ctx.fuel < 0:
                    raise FuelExhausted(ctx.budget)
                for m, body in arms:
                    b = m(v)
                    if b is not None:
                        if b:
                            env = {**env, **b}
                        return body(env, ctx)
                raise MatchFailure(v)

            return case
        if isinstance(e, S.Unary):
            x = sub(e.operand, 0)
            if e.op == "!":
                return lambda env, ctx: not x(env, ctx)
            return lambda env, ctx: -x(env, ctx)
        if isinstance(e, S.Binary):
            l = sub(e.left, 0)
            r = sub(e.right, 1)
            if e.op == "&&":
                return lambda env, ctx: l(env, ctx) and r(env, ctx)
            if e.op == "||":
                return lambda env, ctx: l(env, ctx) or r(env, ctx)
            if e.op == "==":
                return lambda env, ctx: l(env, ctx) == r(env, ctx)
            f = _arith(e.op)
            return lambda env, ctx: f(l(env, ctx), r(env, ctx))
        raise TypeError(f"not an expression: {e!r}")


def evaluate(expr, env=None, functions=(), fuel=DEFAULT_FUEL, cov=None):
    """Evaluate ``expr`` under ``env``; ``functions`` is a Model or FuncDefs."""
    if isinstance(functions, S.Model):
        functions = functions.functions
    ev = Evaluator(functions, instrument=cov is not None)
    fn = ev.compile(expr)
    ctx = Ctx(fuel, cov)
    r = fn(dict(env or {}), ctx)
    return r


__all__ = ["Ctx", "Evaluator", "evaluate", "match", "compile_pattern", "DEFAULT_FUEL",
           "atom_leaves"]

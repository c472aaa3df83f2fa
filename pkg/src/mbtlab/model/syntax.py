"""Abstract syntax of models: data types, functions, components and EFSMs.

All nodes are frozen dataclasses.  Source locations are carried in ``loc`` but
excluded from equality, so structural comparison ignores layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

BUILTIN_TYPES = ("Int", "Bool")

BOOL_OPS = ("&&", "||")
COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*", "/", "%")


def _loc():
    return field(default=None, compare=False, repr=False)


# -- expressions ---------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    loc: object = _loc()


@dataclass(frozen=True)
class Lit:
    value: Union[int, bool]
    loc: object = _loc()

    def __eq__(self, other):
        # True == 1 in Python; literals of different kinds are different syntax
        return (
            isinstance(other, Lit)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self):
        return hash((type(self.value), self.value))


@dataclass(frozen=True)
class ConApp:
    name: str
    args: tuple = ()
    loc: object = _loc()


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple = ()
    loc: object = _loc()


@dataclass(frozen=True)
class Case:
    scrutinee: object
    arms: tuple  # of (Pattern, Expr)
    loc: object = _loc()


@dataclass(frozen=True)
class If:
    cond: object
    then: object
    orelse: object
    loc: object = _loc()


@dataclass(frozen=True)
class Unary:
    op: str  # "!" or "-"
    operand: object
    loc: object = _loc()


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    loc: object = _loc()


Expr = Union[Var, Lit, ConApp, Call, Case, If, Unary, Binary]


def children(expr):
    """Direct subexpressions in syntactic order."""
    if isinstance(expr, (ConApp, Call)):
        return expr.args
    if isinstance(expr, Case):
        return (expr.scrutinee,) + tuple(e for _, e in expr.arms)
    if isinstance(expr, If):
        return (expr.cond, expr.then, expr.orelse)
    if isinstance(expr, Unary):
        return (expr.operand,)
    if isinstance(expr, Binary):
        return (expr.left, expr.right)
    return ()


def is_bool_op(expr):
    return (isinstance(expr, Binary) and expr.op in BOOL_OPS) or (
        isinstance(expr, Unary) and expr.op == "!"
    )


# -- patterns -----------------------------------------------------------------


@dataclass(frozen=True)
class PWild:
    loc: object = _loc()


@dataclass(frozen=True)
class PAbsent:
    loc: object = _loc()


@dataclass(frozen=True)
class PVar:
    name: str
    loc: object = _loc()


@dataclass(frozen=True)
class PLit:
    value: Union[int, bool]
    loc: object = _loc()

    def __eq__(self, other):
        return (
            isinstance(other, PLit)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self):
        return hash((type(self.value), self.value))


@dataclass(frozen=True)
class PCon:
    name: str
    args: tuple = ()
    loc: object = _loc()


Pattern = Union[PWild, PAbsent, PVar, PLit, PCon]


def pattern_binders(p):
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, PCon):
        out = []
        for a in p.args:
            out.extend(pattern_binders(a))
        return out
    return []


# -- declarations -------------------------------------------------------------


@dataclass(frozen=True)
class Constructor:
    name: str
    args: tuple = ()  # type names
    loc: object = _loc()


@dataclass(frozen=True)
class TypeDef:
    name: str
    constructors: tuple
    loc: object = _loc()


@dataclass(frozen=True)
class FuncDef:
    name: str
    params: tuple  # of (name, type)
    result: str
    body: object
    loc: object = _loc()


@dataclass(frozen=True)
class Port:
    name: str
    direction: str  # "in" | "out"
    type: str
    loc: object = _loc()


@dataclass(frozen=True)
class SubInst:
    name: str
    component: str
    loc: object = _loc()


@dataclass(frozen=True)
class Endpoint:
    inst: Optional[str]  # None = the enclosing component's own port
    port: str

    def __str__(self):
        return self.port if self.inst is None else f"{self.inst}.{self.port}"


@dataclass(frozen=True)
class Channel:
    name: str
    src: Endpoint
    dst: Endpoint
    delayed: bool = False
    loc: object = _loc()


@dataclass(frozen=True)
class LocalDecl:
    name: str
    type: str
    init: object  # constant Expr
    loc: object = _loc()


@dataclass(frozen=True)
class Transition:
    src: str
    dst: str
    inputs: tuple = ()  # of (port, Pattern); omitted ports require Absent
    guard: object = None  # Expr or None
    outputs: tuple = ()  # of (port, Expr)
    assigns: tuple = ()  # of (local, Expr)
    loc: object = _loc()


@dataclass(frozen=True)
class Efsm:
    states: tuple
    init: str
    locals: tuple = ()
    transitions: tuple = ()
    loc: object = _loc()


@dataclass(frozen=True)
class Component:
    name: str
    ports: tuple = ()
    subs: tuple = ()
    channels: tuple = ()
    efsm: Optional[Efsm] = None
    tags: tuple = ()
    loc: object = _loc()

    @property
    def atomic(self):
        return self.efsm is not None

    def port(self, name):
        for p in self.ports:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class Observe:
    """Registry-download dialogue used to build observation postambles."""

    query_port: str
    query: object  # constant Expr
    next_port: str
    next: object  # constant Expr
    response: str  # open out-port carrying the dump
    registry: str  # "<instance path>.<local>"
    chunk: int
    loc: object = _loc()


@dataclass(frozen=True)
class Model:
    types: tuple = ()
    functions: tuple = ()
    components: tuple = ()
    observe: Optional[Observe] = None

    def type(self, name):
        for t in self.types:
            if t.name == name:
                return t
        return None

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def component(self, name):
        for c in self.components:
            if c.name == name:
                return c
        return None

    def constructors(self):
        """Map constructor name -> (TypeDef, Constructor)."""
        out = {}
        for t in self.types:
            for c in t.constructors:
                out.setdefault(c.name, (t, c))
        return out

    def root(self):
        """The unique component not instantiated by any other, or None."""
        used = {s.component for c in self.components for s in c.subs}
        roots = [c for c in self.components if c.name not in used]
        if len(roots) == 1:
            return roots[0]
        return None

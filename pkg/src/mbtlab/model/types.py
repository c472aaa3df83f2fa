"""Type lookup helpers and a value/type membership oracle."""

from __future__ import annotations

from .syntax import BUILTIN_TYPES
from .values import ABSENT, Con


class Signature:
    """Name tables of a model: types, constructors and functions."""

    def __init__(self, model):
        self.model = model
        self.types = {t.name: t for t in model.types}
        self.cons = {}
        for t in model.types:
            for c in t.constructors:
                self.cons.setdefault(c.name, (t.name, c.args))
        self.funcs = {f.name: f for f in model.functions}

    def known_type(self, name):
        return name in BUILTIN_TYPES or name in self.types

    def list_shape(self, tname):
        """(nil, cons, element type) if ``tname`` is a list-like type, else None.

        List-like: exactly one nullary constructor and one binary constructor
        whose second argument is the type itself.
        """
        t = self.types.get(tname)
        if t is None or len(t.constructors) != 2:
            return None
        nil = [c for c in t.constructors if not c.args]
        cons = [c for c in t.constructors if len(c.args) == 2 and c.args[1] == tname]
        if len(nil) != 1 or len(cons) != 1:
            return None
        return nil[0].name, cons[0].name, cons[0].args[0]


def has_type(v, tname, sig):
    """True iff ``v`` is a well-typed value of type ``tname`` (Absent excluded)."""
    if v is ABSENT:
        return False
    if tname == "Bool":
        return isinstance(v, bool)
    if tname == "Int":
        return isinstance(v, int) and not isinstance(v, bool)
    if not isinstance(v, Con):
        return False
    entry = sig.cons.get(v[0])
    if entry is None or entry[0] != tname or len(entry[1]) != len(v) - 1:
        return False
    return all(has_type(a, t, sig) for a, t in zip(v[1:], entry[1]))


def list_items(v, shape):
    """Elements of a list-like value, in order."""
    nil, cons, _ = shape
    out = []
    while isinstance(v, Con) and v[0] == cons:
        out.append(v[1])
        v = v[2]
    return out


def make_list(items, shape):
    nil, cons, _ = shape
    v = Con.make(nil)
    for x in reversed(items):
        v = Con((cons, x, v))
    return v

"""Depth-bounded value universes of model types."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from ..errors import UniverseExhausted
from ..model.types import Signature
from ..model.values import ABSENT, Con, value_key


@dataclass(frozen=True)
class UniverseConfig:
    depth: int = 3
    int_range: tuple = (0, 3)
    per_type: dict = field(default_factory=dict)  # type name -> depth bound


class Universe:
    """All values of each type whose constructor nesting depth is at most the bound.

    Leaves (Bool, Int, nullary constructors) have depth 1.  Int ranges over
    the configured closed interval.
    """

    def __init__(self, model, config=None):
        self.sig = Signature(model)
        self.config = config or UniverseConfig()
        self._memo = {}

    def values(self, tname, depth=None):
        if depth is None:
            depth = self.config.per_type.get(tname, self.config.depth)
        vals = self._values(tname, depth)
        if not vals:
            raise UniverseExhausted(tname, depth)
        return vals

    def _values(self, tname, depth):
        key = (tname, depth)
        if key in self._memo:
            return self._memo[key]
        if depth < 1:
            out = ()
        elif tname == "Bool":
            out = (False, True)
        elif tname == "Int":
            lo, hi = self.config.int_range
            out = tuple(range(lo, hi + 1))
        else:
            t = self.sig.types.get(tname)
            vals = []
            for c in t.constructors if t else ():
                if not c.args:
                    vals.append(Con.make(c.name))
                    continue
                pools = [self._values(a, depth - 1) for a in c.args]
                vals.extend(Con((c.name, *args)) for args in product(*pools))
            out = tuple(sorted(vals, key=value_key))
        self._memo[key] = out
        return out

    def port_inputs(self, ports):
        """Every joint input valuation of the given (name, type) ports, Absent included."""
        pools = [(ABSENT,) + self.values(t) for _, t in ports]
        names = [n for n, _ in ports]
        return [dict(zip(names, combo)) for combo in product(*pools)]


def input_universe(runtime, config=None):
    """Joint input valuations over the root component's open in-ports."""
    root = runtime.model.root()
    ports = [(p.name, p.type) for p in root.ports if p.direction == "in"]
    return Universe(runtime.model, config).port_inputs(ports)

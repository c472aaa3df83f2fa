"""Intensional test-case specifications and their online monitors.

A specification is a conjunction of constraints over *events*: an event
happens at a step when the value observed on a channel matches a pattern.
Monitor states are small tuples, so they can take part in hashing during
exploration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError
from ..model.evaluator import compile_pattern

PENDING = "pending"
SATISFIED = "satisfied"
VIOLATED = "violatedForever"


@dataclass(frozen=True)
class Event:
    channel: str
    pattern: object  # a value pattern (syntax.Pattern)


@dataclass(frozen=True)
class Occurs:
    event: Event
    min: int = 1
    max: int = 1


@dataclass(frozen=True)
class NotOccurs:
    event: Event


@dataclass(frozen=True)
class Precedes:
    first: Event
    then: Event


@dataclass(frozen=True)
class WithinSteps:
    event: Event
    lo: int
    hi: int


@dataclass(frozen=True)
class And:
    parts: tuple = ()


@dataclass(frozen=True)
class TestSpec:
    __test__ = False  # not a pytest class

    id: str
    constraint: object = field(default_factory=And)
    title: str = ""


TRIVIAL = TestSpec("true", And(()), "no constraint")


def leaves(node):
    if isinstance(node, And):
        out = []
        for p in node.parts:
            out.extend(leaves(p))
        return out
    return [node]


def events_of(leaf):
    if isinstance(leaf, Precedes):
        return [leaf.first, leaf.then]
    return [leaf.event]


def check_spec(spec, channels):
    """Raise ConfigError unless ``spec`` is well formed over ``channels``."""
    for leaf in leaves(spec.constraint):
        for ev in events_of(leaf):
            if ev.channel not in channels:
                raise ConfigError(f"spec {spec.id}: unknown channel {ev.channel}")
        if isinstance(leaf, Occurs) and not 0 <= leaf.min <= leaf.max:
            raise ConfigError(f"spec {spec.id}: need 0 <= min <= max")
        if isinstance(leaf, WithinSteps) and not 1 <= leaf.lo <= leaf.hi:
            raise ConfigError(f"spec {spec.id}: need 1 <= lo <= hi")


class Monitor:
    """Online evaluator of one specification.

    ``start`` is the state before any step; ``step(state, observed)`` consumes
    the values observed at one step (a mapping channel -> value).  The
    ``violatedForever`` status is absorbing.
    """

    def __init__(self, spec):
        self.spec = spec
        self.leaves = leaves(spec.constraint)
        self._steps = [self._compile(l) for l in self.leaves]
        self.start = tuple(init for init, _, _ in self._steps)
        self.channels = sorted({e.channel for l in self.leaves for e in events_of(l)})

    @staticmethod
    def _matcher(ev):
        m = compile_pattern(ev.pattern)
        ch = ev.channel

        def hit(obs):
            return m(obs[ch]) is not None

        return hit

    def _compile(self, leaf):
        if isinstance(leaf, Occurs):
            hit = self._matcher(leaf.event)
            lo, hi = leaf.min, leaf.max

            def step(s, obs):
                return min(s + 1, hi + 1) if hit(obs) else s

            def status(s):
                return VIOLATED if s > hi else SATISFIED if s >= lo else PENDING

            return 0, step, status
        if isinstance(leaf, NotOccurs):
            hit = self._matcher(leaf.event)
            return (
                False,
                lambda s, obs: s or hit(obs),
                lambda s: VIOLATED if s else SATISFIED,
            )
        if isinstance(leaf, Precedes):
            a = self._matcher(leaf.first)
            b = self._matcher(leaf.then)

            # 0 nothing yet, 1 first seen, 2 then seen after first, 3 then seen too early
            def step(s, obs):
                if s == 0:
                    if a(obs):
                        return 2 if b(obs) else 1
                    return 3 if b(obs) else 0
                if s == 1:
                    return 2 if b(obs) else 1
                return s

            return 0, step, lambda s: (PENDING, PENDING, SATISFIED, VIOLATED)[s]
        if isinstance(leaf, WithinSteps):
            hit = self._matcher(leaf.event)
            lo, hi = leaf.lo, leaf.hi

            # state: (steps seen, capped at hi; window hit)
            def step(s, obs):
                n, done = s
                if done or n >= hi:
                    return s
                n += 1
                return (n, n >= lo and hit(obs))

            def status(s):
                n, done = s
                return SATISFIED if done else VIOLATED if n >= hi else PENDING

            return (0, False), step, status
        raise TypeError(f"not a constraint: {leaf!r}")

    def step(self, state, observed):
        return tuple(st(s, observed) for s, (_, st, _) in zip(state, self._steps))

    def status(self, state):
        out = SATISFIED
        for s, (_, _, stat) in zip(state, self._steps):
            r = stat(s)
            if r == VIOLATED:
                return VIOLATED
            if r == PENDING:
                out = PENDING
        return out

    def run(self, observations):
        s = self.start
        for obs in observations:
            s = self.step(s, obs)
        return self.status(s)

"""Test cases and suites as plain data."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from .dsl.printer import print_model


@dataclass(frozen=True)
class Step:
    inputs: dict  # open in-port -> value (Absent allowed)
    expected: dict  # open out-port -> value (Absent allowed)


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    id: str
    steps: tuple
    length: int  # body length, without the postamble
    postamble_length: int = 0
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def body(self):
        return self.steps[: self.length]

    @property
    def postamble(self):
        return self.steps[self.length:]

    def input_key(self):
        """Structural key of the body's input sequence, used for deduplication."""
        return tuple(tuple(sorted(s.inputs.items())) for s in self.body)

    def with_id(self, new_id):
        return replace(self, id=new_id)


@dataclass(frozen=True)
class Suite:
    model_hash: str
    generator: dict
    cases: tuple = ()

    def __len__(self):
        return len(self.cases)

    def subset(self, cases):
        return replace(self, cases=tuple(cases))


def model_hash(model):
    return hashlib.sha256(print_model(model).encode("utf-8")).hexdigest()

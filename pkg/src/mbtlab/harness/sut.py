"""Systems under test: a concrete model run by the engine, or an external process.

Both expose ``open()`` returning a session with ``tick(inputs) -> outputs``,
an ``events`` set of coverage events and ``close()``.  One session serves
one test case.
"""

from __future__ import annotations

import json
import subprocess

from ..dsl.parser import parse_value
from ..errors import MbtError
from ..model.engine import Runtime
from ..model.evaluator import DEFAULT_FUEL
from ..model.values import ABSENT, format_value


class SutError(MbtError):
    """The system under test failed to produce a tick's outputs."""


class _ModelSession:
    def __init__(self, rt):
        self.rt = rt
        self.state = rt.initial_state()
        self.events = set()

    def tick(self, inputs):
        full = {p: inputs.get(p, ABSENT) for p in self.rt.in_ports}
        self.state, out = self.rt.step(self.state, full, cov=self.events)
        return out

    def close(self):
        pass


class ModelSut:
    """A (possibly mutated) concrete model executed by the instrumented engine."""

    def __init__(self, model, fuel=DEFAULT_FUEL):
        self.model = model
        self.rt = Runtime(model, fuel=fuel, instrument=True)

    def open(self):
        return _ModelSession(self.rt)


class _ProcessSession:
    def __init__(self, argv, timeout):
        self.timeout = timeout
        self.events = set()
        self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                     text=True, encoding="utf-8", bufsize=1)

    def tick(self, inputs):
        line = json.dumps({"inputs": {ch: format_value(v) for ch, v in inputs.items()}},
                          ensure_ascii=False)
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
            reply = self.proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise SutError(f"external SUT closed its pipe: {exc}") from exc
        if not reply:
            raise SutError(f"external SUT exited with code {self.proc.poll()}")
        try:
            doc = json.loads(reply)
            outputs = {ch: parse_value(t) for ch, t in doc["outputs"].items()}
        except (ValueError, KeyError, MbtError) as exc:
            raise SutError(f"malformed reply from external SUT: {reply!r}") from exc
        for ident, outcome in doc.get("coverage", ()):
            self.events.add((ident, bool(outcome)))
        return outputs

    def close(self):
        try:
            self.proc.stdin.close()
            self.proc.wait(timeout=self.timeout)
        except (OSError, subprocess.TimeoutExpired):
            self.proc.kill()
            self.proc.wait()


class ExternalSut:
    """A process speaking one JSON object per line on stdin/stdout, started per test case."""

    def __init__(self, argv, timeout=10.0):
        self.argv = list(argv)
        self.timeout = timeout

    def open(self):
        return _ProcessSession(self.argv, self.timeout)

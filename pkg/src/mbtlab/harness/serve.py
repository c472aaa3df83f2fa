"""Serve a model as an external SUT over the line protocol.

    python -m mbtlab.harness.serve model.afm [--coverage]

Each input line ``{"inputs": {...}}`` is answered by ``{"outputs": {...}}``.
With ``--coverage`` the reply also lists the coverage events of that tick.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..dsl.parser import parse_model, parse_value
from ..model.validate import ensure_valid
from ..model.values import format_value
from .sut import ModelSut


def serve(model, stdin, stdout, coverage=False):
    session = ModelSut(model).open()
    for line in stdin:
        if not line.strip():
            continue
        doc = json.loads(line)
        inputs = {ch: parse_value(t) for ch, t in doc.get("inputs", {}).items()}
        before = set(session.events)
        out = session.tick(inputs)
        reply = {"outputs": {ch: format_value(v) for ch, v in sorted(out.items())}}
        if coverage:
            reply["coverage"] = sorted([i, o] for i, o in session.events - before)
        stdout.write(json.dumps(reply, ensure_ascii=False) + "\n")
        stdout.flush()


def main(argv=None):
    ap = argparse.ArgumentParser(prog="python -m mbtlab.harness.serve")
    ap.add_argument("model")
    ap.add_argument("--coverage", action="store_true")
    args = ap.parse_args(argv)
    with open(args.model, encoding="utf-8") as fh:
        model = parse_model(fh.read(), args.model)
    ensure_valid(model)
    serve(model, sys.stdin, sys.stdout, args.coverage)


if __name__ == "__main__":
    main()

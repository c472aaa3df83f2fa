"""JSON carriers for test suites, test specifications and spec families."""

from __future__ import annotations

import json
from dataclasses import dataclass

import jsonschema

from ..errors import ParseError, SchemaViolation
from ..model.values import format_value
from ..suite import Step, Suite, TestCase
from ..testgen import spec as T
from .parser import parse_value, parse_value_pattern
from .printer import print_pattern

_TERM = {"type": "string"}
_VALUATION = {"type": "object", "additionalProperties": _TERM}

SUITE_SCHEMA = {
    "type": "object",
    "required": ["model_hash", "generator", "cases"],
    "additionalProperties": False,
    "properties": {
        "model_hash": {"type": "string"},
        "generator": {
            "type": "object",
            "required": ["kind", "seed"],
            "properties": {
                "kind": {"enum": ["A", "B", "C", "D", "E", "F", "G"]},
                "seed": {"type": ["integer", "null"]},
                "spec_id": {"type": "string"},
            },
        },
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "length", "postamble_length", "steps"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "length": {"type": "integer", "minimum": 0},
                    "postamble_length": {"type": "integer", "minimum": 0},
                    "provenance": {"type": "object"},
                    "steps": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["inputs", "expected"],
                            "additionalProperties": False,
                            "properties": {"inputs": _VALUATION, "expected": _VALUATION},
                        },
                    },
                },
            },
        },
    },
}

_EVENT = {
    "type": "object",
    "required": ["channel", "pattern"],
    "properties": {"channel": {"type": "string"}, "pattern": {"type": "string"}},
}

SPEC_SCHEMA = {
    "definitions": {
        "node": {
            "oneOf": [
                {
                    "type": "object", "required": ["and"], "additionalProperties": False,
                    "properties": {"and": {"type": "array", "items": {"$ref": "#/definitions/node"}}},
                },
                {
                    "type": "object", "required": ["occurs"], "additionalProperties": False,
                    "properties": {"occurs": {
                        "allOf": [_EVENT],
                        "required": ["min", "max"],
                        "properties": {"min": {"type": "integer", "minimum": 0},
                                       "max": {"type": "integer", "minimum": 0}},
                    }},
                },
                {
                    "type": "object", "required": ["notOccurs"], "additionalProperties": False,
                    "properties": {"notOccurs": _EVENT},
                },
                {
                    "type": "object", "required": ["precedes"], "additionalProperties": False,
                    "properties": {"precedes": {
                        "type": "object", "required": ["first", "then"],
                        "properties": {"first": _EVENT, "then": _EVENT},
                    }},
                },
                {
                    "type": "object", "required": ["within"], "additionalProperties": False,
                    "properties": {"within": {
                        "allOf": [_EVENT],
                        "required": ["lo", "hi"],
                        "properties": {"lo": {"type": "integer", "minimum": 1},
                                       "hi": {"type": "integer", "minimum": 1}},
                    }},
                },
            ]
        },
        "spec": {
            "type": "object",
            "required": ["id", "constraint"],
            "additionalProperties": False,
            "properties": {
                "id": {"type": "string"},
                "title": {"type": "string"},
                "constraint": {"$ref": "#/definitions/node"},
            },
        },
    },
    "oneOf": [
        {"$ref": "#/definitions/spec"},
        {
            "type": "object",
            "required": ["family", "specs"],
            "additionalProperties": False,
            "properties": {
                "family": {"type": "string"},
                "title": {"type": "string"},
                "specs": {"type": "array", "items": {"$ref": "#/definitions/spec"}},
            },
        },
    ],
}


@dataclass(frozen=True)
class SpecFamily:
    family: str
    specs: tuple
    title: str = ""


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def _load(text, schema):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("", f"invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        # oneOf failures report the parent; the deepest context is more useful
        best = jsonschema.exceptions.best_match([exc]) if exc.context else exc
        raise SchemaViolation(_pointer(best.absolute_path), best.message) from None
    return doc


def _dump(doc):
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# -- suites ---------------------------------------------------------------------


def _value(term, pointer):
    try:
        return parse_value(term)
    except ParseError as exc:
        raise SchemaViolation(pointer, f"bad value term {term!r}: {exc}") from None


def parse_suite(text):
    doc = _load(text, SUITE_SCHEMA)
    cases = []
    for i, c in enumerate(doc["cases"]):
        base = f"/cases/{i}"
        if len(c["steps"]) != c["length"] + c["postamble_length"]:
            raise SchemaViolation(
                f"{base}/steps",
                f"{len(c['steps'])} steps but length {c['length']} + "
                f"postamble {c['postamble_length']}",
            )
        steps = []
        for k, s in enumerate(c["steps"]):
            sp = f"{base}/steps/{k}"
            steps.append(Step(
                {ch: _value(t, f"{sp}/inputs/{ch}") for ch, t in s["inputs"].items()},
                {ch: _value(t, f"{sp}/expected/{ch}") for ch, t in s["expected"].items()},
            ))
        cases.append(TestCase(c["id"], tuple(steps), c["length"], c["postamble_length"],
                              dict(c.get("provenance", {}))))
    return Suite(doc["model_hash"], dict(doc["generator"]), tuple(cases))


def suite_to_json(suite):
    cases = []
    for c in suite.cases:
        d = {"id": c.id, "length": c.length, "postamble_length": c.postamble_length}
        if c.provenance:
            d["provenance"] = dict(c.provenance)
        d["steps"] = [
            {
                "inputs": {ch: format_value(v) for ch, v in s.inputs.items()},
                "expected": {ch: format_value(v) for ch, v in s.expected.items()},
            }
            for s in c.steps
        ]
        cases.append(d)
    return {"model_hash": suite.model_hash, "generator": dict(suite.generator), "cases": cases}


def print_suite(suite):
    return _dump(suite_to_json(suite))


# -- specifications -----------------------------------------------------------


def _event(d, pointer):
    try:
        pat = parse_value_pattern(d["pattern"])
    except ParseError as exc:
        raise SchemaViolation(f"{pointer}/pattern", f"bad pattern: {exc}") from None
    return T.Event(d["channel"], pat)


def _node(d, pointer):
    if "and" in d:
        return T.And(tuple(_node(x, f"{pointer}/and/{i}") for i, x in enumerate(d["and"])))
    if "occurs" in d:
        o = d["occurs"]
        if o["min"] > o["max"]:
            raise SchemaViolation(f"{pointer}/occurs", "min exceeds max")
        return T.Occurs(_event(o, f"{pointer}/occurs"), o["min"], o["max"])
    if "notOccurs" in d:
        return T.NotOccurs(_event(d["notOccurs"], f"{pointer}/notOccurs"))
    if "precedes" in d:
        p = d["precedes"]
        return T.Precedes(_event(p["first"], f"{pointer}/precedes/first"),
                          _event(p["then"], f"{pointer}/precedes/then"))
    w = d["within"]
    if w["lo"] > w["hi"]:
        raise SchemaViolation(f"{pointer}/within", "lo exceeds hi")
    return T.WithinSteps(_event(w, f"{pointer}/within"), w["lo"], w["hi"])


def _spec(d, pointer):
    return T.TestSpec(d["id"], _node(d["constraint"], f"{pointer}/constraint"), d.get("title", ""))


def parse_spec(text):
    """A TestSpec, or a SpecFamily when the document lists several specs."""
    doc = _load(text, SPEC_SCHEMA)
    if "family" in doc:
        specs = tuple(_spec(s, f"/specs/{i}") for i, s in enumerate(doc["specs"]))
        return SpecFamily(doc["family"], specs, doc.get("title", ""))
    return _spec(doc, "")


def _event_json(ev):
    return {"channel": ev.channel, "pattern": print_pattern(ev.pattern)}


def _node_json(n):
    if isinstance(n, T.And):
        return {"and": [_node_json(x) for x in n.parts]}
    if isinstance(n, T.Occurs):
        return {"occurs": {**_event_json(n.event), "min": n.min, "max": n.max}}
    if isinstance(n, T.NotOccurs):
        return {"notOccurs": _event_json(n.event)}
    if isinstance(n, T.Precedes):
        return {"precedes": {"first": _event_json(n.first), "then": _event_json(n.then)}}
    return {"within": {**_event_json(n.event), "lo": n.lo, "hi": n.hi}}


def _spec_json(s):
    d = {"id": s.id}
    if s.title:
        d["title"] = s.title
    d["constraint"] = _node_json(s.constraint)
    return d


def print_spec(spec):
    if isinstance(spec, SpecFamily):
        doc = {"family": spec.family}
        if spec.title:
            doc["title"] = spec.title
        doc["specs"] = [_spec_json(s) for s in spec.specs]
        return _dump(doc)
    return _dump(_spec_json(spec))


def load_specs(path):
    """Every TestSpec in a .spec.json file (single spec or family)."""
    with open(path, encoding="utf-8") as f:
        doc = parse_spec(f.read())
    return list(doc.specs) if isinstance(doc, SpecFamily) else [doc]


def read_suite(path):
    with open(path, encoding="utf-8") as f:
        return parse_suite(f.read())


def write_suite(suite, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(print_suite(suite))

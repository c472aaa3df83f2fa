"""Bridge between abstract test steps and a concrete system under test.

Inputs are concretized rule by rule: a rule either substitutes one value
(e.g. an error class becomes a representative code) or expands it into
several concrete ticks (e.g. a timeout becomes a number of clock ticks).
Concrete outputs are abstracted back: codes collapse to their class and a
burst of partial responses folds into one abstract response.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema

from ..dsl.parser import parse_expr, parse_pattern
from ..errors import SchemaViolation, UncoveredValue
from ..model import syntax as S
from ..model.evaluator import compile_pattern
from ..model.types import Signature, list_items, make_list
from ..model.values import ABSENT, Con, head, value_key

POLICIES = ("exact", "listAsMultiset", "exceptionOnly")

ADAPTER_SCHEMA = {
    "type": "object",
    "required": ["inputs", "outputs"],
    "additionalProperties": False,
    "properties": {
        "classes": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
            },
        },
        "inputs": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["match", "ticks"],
                    "additionalProperties": False,
                    "properties": {
                        "match": {"type": "string"},
                        "ticks": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                        "settle": {"enum": ["merge", "last"]},
                    },
                },
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "policy": {"enum": list(POLICIES)},
                    "errors": {"type": "array", "items": {"type": "string"}},
                    "merge": {
                        "type": "object",
                        "required": ["part", "into", "list"],
                        "properties": {"part": {"type": "string"}, "into": {"type": "string"},
                                       "list": {"type": "string"}},
                    },
                    "rules": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["match", "to"],
                            "additionalProperties": False,
                            "properties": {"match": {"type": "string"}, "to": {"type": "string"}},
                        },
                    },
                },
            },
        },
    },
}

# synthetic heads that can never be produced by a model
EARLY = "__early__"
BURST = "__burst__"


@dataclass(frozen=True)
class InputRule:
    pattern: object  # value -> bindings or None
    ticks: tuple  # templates; None stands for an idle tick
    settle: str = "merge"


@dataclass(frozen=True)
class OutputRule:
    pattern: object
    template: object


@dataclass
class Channel:
    policy: str = "exact"
    rules: list = field(default_factory=list)
    merge: tuple = None  # (part constructor, result constructor, list shape)
    errors: frozenset = frozenset()


class Adapter:
    def __init__(self, classes, inputs, outputs, list_shapes):
        self.classes = classes
        self.inputs = inputs
        self.outputs = outputs
        self.list_shapes = list_shapes
        self._list_cons = {}
        for shape in list_shapes.values():
            self._list_cons[shape[0]] = shape
            self._list_cons[shape[1]] = shape

    # -- templates --------------------------------------------------------

    def _fill(self, tpl, env, channel, direction):
        if isinstance(tpl, S.Var):
            return env[tpl.name]
        if isinstance(tpl, S.Lit):
            return tpl.value
        if isinstance(tpl, S.ConApp):
            return Con.make(tpl.name, [self._fill(a, env, channel, direction) for a in tpl.args])
        if isinstance(tpl, S.Call) and tpl.name in self.classes and len(tpl.args) == 1:
            table = self.classes[tpl.name]
            v = self._fill(tpl.args[0], env, channel, direction)
            if direction == "in":
                # class constructor -> its first representative
                if isinstance(v, Con) and v[0] in table:
                    return table[v[0]][0]
            else:
                for cls, codes in table.items():
                    if v in codes and not isinstance(v, bool):
                        return Con.make(cls, ())
            raise UncoveredValue(channel, v)
        raise SchemaViolation("", f"unsupported template {tpl!r}")

    # -- inputs -----------------------------------------------------------

    def expand(self, inputs):
        """Concrete ticks for one abstract input valuation, plus the settle mode."""
        per_channel = {}
        settle = "merge"
        width = 1
        for ch, v in inputs.items():
            if v is ABSENT:
                continue
            for rule in self.inputs.get(ch, ()):
                env = rule.pattern(v)
                if env is None:
                    continue
                ticks = [ABSENT if t is None else self._fill(t, env, ch, "in") for t in rule.ticks]
                per_channel[ch] = ticks
                if len(ticks) > width:
                    width, settle = len(ticks), rule.settle
                break
            else:
                raise UncoveredValue(ch, v)
        out = []
        for k in range(width):
            tick = {ch: ABSENT for ch in inputs}
            for ch, ticks in per_channel.items():
                if k < len(ticks):
                    tick[ch] = ticks[k]
            out.append(tick)
        return out, settle

    def concretize(self, inputs):
        return self.expand(inputs)[0]

    # -- outputs ----------------------------------------------------------

    def _map(self, ch, v):
        spec = self.outputs.get(ch)
        if spec is None:
            return v
        for rule in spec.rules:
            env = rule.pattern(v)
            if env is not None:
                return self._fill(rule.template, env, ch, "out")
        raise UncoveredValue(ch, v)

    def abstract_channel(self, ch, values, settle="merge"):
        """One abstract value from the values a channel carried over the expanded ticks."""
        if settle == "last":
            early = [v for v in values[:-1] if v is not ABSENT]
            if early:
                return Con.make(EARLY, [early[0]])
            return ABSENT if values[-1] is ABSENT else self._map(ch, values[-1])
        present = [v for v in values if v is not ABSENT]
        if not present:
            return ABSENT
        spec = self.outputs.get(ch)
        if spec is not None and spec.merge is not None:
            part, into, shape = spec.merge
            if all(isinstance(v, Con) and v[0] == part and len(v) == 2 for v in present):
                return Con.make(into, [make_list([v[1] for v in present], shape)])
        if len(present) == 1:
            return self._map(ch, present[0])
        return Con.make(BURST, [self._map(ch, v) for v in present])

    def abstract(self, ticks, settle="merge"):
        """Abstract output valuation from a list of concrete output valuations."""
        channels = sorted({ch for t in ticks for ch in t})
        return {ch: self.abstract_channel(ch, [t.get(ch, ABSENT) for t in ticks], settle)
                for ch in channels}

    # -- comparison -------------------------------------------------------

    def policy(self, ch):
        spec = self.outputs.get(ch)
        return spec.policy if spec is not None else "exact"

    def normalize(self, v):
        """Value with every list-shaped subterm sorted, for multiset comparison."""
        if not isinstance(v, Con):
            return v
        shape = self._list_cons.get(v[0])
        if shape is not None:
            items = sorted((self.normalize(x) for x in list_items(v, shape)), key=value_key)
            return make_list(items, shape)
        return Con.make(v[0], [self.normalize(a) for a in v[1:]])

    def compare(self, ch, expected, actual):
        policy = self.policy(ch)
        errors = self.outputs[ch].errors if ch in self.outputs else frozenset()
        return compare(policy, expected, actual, self.normalize, errors)


def compare(policy, expected, actual, normalize=None, errors=frozenset()):
    """Whether ``actual`` conforms to ``expected`` under a comparison policy."""
    if policy == "exact":
        return expected == actual
    if policy == "listAsMultiset":
        return normalize(expected) == normalize(actual)
    if policy == "exceptionOnly":
        return (head(expected) in errors) == (head(actual) in errors)
    raise ValueError(f"unknown comparison policy {policy}")


def load_adapter(doc, abstract_model, concrete_model=None):
    """Adapter from its JSON document (dict or text) and the model pair it bridges."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaViolation("", f"invalid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, ADAPTER_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaViolation("/" + "/".join(map(str, exc.absolute_path)), exc.message) from None
    cons = set(abstract_model.constructors())
    if concrete_model is not None:
        cons |= set(concrete_model.constructors())
    sig = Signature(abstract_model)
    shapes = {t.name: sig.list_shape(t.name) for t in abstract_model.types}
    shapes = {k: v for k, v in shapes.items() if v is not None}

    def tpl(text, pointer):
        if text.strip() == "ε":
            return None
        try:
            return parse_expr(text, cons)
        except Exception as exc:
            raise SchemaViolation(pointer, f"bad template {text!r}: {exc}") from None

    def pat(text, pointer):
        try:
            matcher = compile_pattern(parse_pattern(text, cons))
        except Exception as exc:
            raise SchemaViolation(pointer, f"bad pattern {text!r}: {exc}") from None

        def bind(v):
            b = matcher(v)
            return None if b is None else dict(b)
        return bind

    inputs = {}
    for ch, rules in doc["inputs"].items():
        inputs[ch] = [
            InputRule(pat(r["match"], f"/inputs/{ch}/{i}/match"),
                      tuple(tpl(t, f"/inputs/{ch}/{i}/ticks/{k}") for k, t in enumerate(r["ticks"])),
                      r.get("settle", "merge"))
            for i, r in enumerate(rules)
        ]
    outputs = {}
    for ch, spec in doc["outputs"].items():
        merge = None
        if "merge" in spec:
            m = spec["merge"]
            if m["list"] not in shapes:
                raise SchemaViolation(f"/outputs/{ch}/merge/list", f"{m['list']} is not a list type")
            merge = (m["part"], m["into"], shapes[m["list"]])
        rules = [OutputRule(pat(r["match"], f"/outputs/{ch}/rules/{i}/match"),
                            tpl(r["to"], f"/outputs/{ch}/rules/{i}/to"))
                 for i, r in enumerate(spec.get("rules", [{"match": "x", "to": "x"}]))]
        outputs[ch] = Channel(spec.get("policy", "exact"), rules, merge,
                              frozenset(spec.get("errors", ())))
    return Adapter(dict(doc.get("classes", {})), inputs, outputs, shapes)


def read_adapter(path, abstract_model, concrete_model=None):
    with open(path, encoding="utf-8") as fh:
        return load_adapter(fh.read(), abstract_model, concrete_model)

"""Canonical text rendering of models, expressions and patterns."""

from __future__ import annotations

from ..model import syntax as S

# binding strength; higher binds tighter
_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
         "+": 4, "-": 4, "*": 5, "/": 5, "%": 5}
_UNARY = 6
_ATOM = 7


def _prec(e):
    if isinstance(e, S.Binary):
        return _PREC[e.op]
    if isinstance(e, S.Unary):
        return _UNARY
    if isinstance(e, (S.If, S.Case)):
        return 0
    if isinstance(e, S.Lit) and not isinstance(e.value, bool) and e.value < 0:
        return _UNARY
    return _ATOM


def print_expr(e):
    if isinstance(e, S.Var):
        return e.name
    if isinstance(e, S.Lit):
        if isinstance(e.value, bool):
            return "true" if e.value else "false"
        return str(e.value)
    if isinstance(e, S.ConApp):
        if not e.args:
            return e.name
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, S.Call):
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, S.If):
        return f"if {print_expr(e.cond)} then {print_expr(e.then)} else {print_expr(e.orelse)}"
    if isinstance(e, S.Case):
        arms = "; ".join(f"{print_pattern(p)} -> {print_expr(x)}" for p, x in e.arms)
        return f"case {print_expr(e.scrutinee)} of {{ {arms} }}"
    if isinstance(e, S.Unary):
        inner = print_expr(e.operand)
        # `-3` would re-parse as a negative literal, so keep the operator visible
        if _prec(e.operand) < _ATOM or (e.op == "-" and isinstance(e.operand, S.Lit)):
            inner = f"({inner})"
        return e.op + inner
    if isinstance(e, S.Binary):
        p = _PREC[e.op]
        left, right = print_expr(e.left), print_expr(e.right)
        nonassoc = p == 3
        if _prec(e.left) < p or (nonassoc and _prec(e.left) == p):
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def print_pattern(p):
    if isinstance(p, S.PWild):
        return "_"
    if isinstance(p, S.PAbsent):
        return "ε"
    if isinstance(p, S.PVar):
        return p.name
    if isinstance(p, S.PLit):
        if isinstance(p.value, bool):
            return "true" if p.value else "false"
        return str(p.value)
    if isinstance(p, S.PCon):
        if not p.args:
            return p.name
        return f"{p.name}({', '.join(print_pattern(a) for a in p.args)})"
    raise TypeError(f"not a pattern: {p!r}")


def _print_transition(t):
    parts = [f"trans {t.src} -> {t.dst}"]
    if t.inputs:
        parts.append("when " + ", ".join(f"{p} ? {print_pattern(x)}" for p, x in t.inputs))
    if t.guard is not None:
        parts.append("if " + print_expr(t.guard))
    if t.outputs:
        parts.append("then " + ", ".join(f"{p} ! {print_expr(x)}" for p, x in t.outputs))
    if t.assigns:
        parts.append("set " + ", ".join(f"{n} := {print_expr(x)}" for n, x in t.assigns))
    return "\n      ".join(parts)


def _print_component(c):
    head = ("concrete " if "concrete" in c.tags else "") + f"component {c.name} {{"
    lines = [head]
    if c.ports:
        ports = "; ".join(f"{p.direction} {p.name} : {p.type}" for p in c.ports)
        lines.append(f"  ports {{ {ports} }}")
    if c.subs:
        subs = "; ".join(f"{s.name} : {s.component}" for s in c.subs)
        lines.append(f"  sub {{ {subs} }}")
    if c.channels:
        lines.append("  channels {")
        for ch in c.channels:
            suffix = " delayed" if ch.delayed else ""
            lines.append(f"    {ch.name} : {ch.src} -> {ch.dst}{suffix};")
        lines.append("  }")
    if c.efsm is not None:
        e = c.efsm
        lines.append("  efsm {")
        lines.append(f"    states {', '.join(e.states)};")
        lines.append(f"    init {e.init};")
        for l in e.locals:
            lines.append(f"    local {l.name} : {l.type} = {print_expr(l.init)};")
        for t in e.transitions:
            lines.append(f"    {_print_transition(t)};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def print_model(model):
    blocks = []
    for t in model.types:
        cons = " | ".join(
            c.name if not c.args else f"{c.name}({', '.join(c.args)})" for c in t.constructors
        )
        blocks.append(f"type {t.name} = {cons}")
    for f in model.functions:
        params = ", ".join(f"{n} : {ty}" for n, ty in f.params)
        blocks.append(f"fun {f.name}({params}) : {f.result} =\n  {print_expr(f.body)}")
    for c in model.components:
        blocks.append(_print_component(c))
    o = model.observe
    if o is not None:
        blocks.append(
            "observe {\n"
            f"  query {o.query_port} ! {print_expr(o.query)};\n"
            f"  next {o.next_port} ! {print_expr(o.next)};\n"
            f"  response {o.response};\n"
            f"  registry {o.registry};\n"
            f"  chunk {o.chunk}\n"
            "}"
        )
    return "\n\n".join(blocks) + "\n"

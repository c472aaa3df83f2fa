"""Where the condition/decision structure of an expression lives.

A *decision* is a transition guard, the condition of an ``if``, or any
boolean-operator expression (``&&``, ``||``, ``!``) that is not already part
of the operator tree of an enclosing decision.  The *atoms* of a decision are
the leaves of its operator tree; a decision whose root is not a boolean
operator has a single atom, the root itself.  Pattern-match dispatch in
``case`` is deliberately not a decision.

Identifiers are ``D:<owner>:<path>`` and ``A:<owner>:<path>`` where path is the
dotted child-index path from the owner's root expression.
"""

from __future__ import annotations

from .syntax import If, children, is_bool_op


def decision_id(owner, path):
    return f"D:{owner}:{path}"


def atom_id(owner, path):
    return f"A:{owner}:{path}"


def atom_leaves(expr, path):
    """(expr, path) of the atoms of a decision rooted at expr."""
    if is_bool_op(expr):
        out = []
        for i, c in enumerate(children(expr)):
            out.extend(atom_leaves(c, f"{path}.{i}"))
        return out
    return [(expr, path)]


def walk(expr, owner, path, is_decision=False):
    """Yield ("decision", id, n_atoms) and ("atom", id) items in syntactic order."""
    if is_decision or is_bool_op(expr):
        leaves = atom_leaves(expr, path)
        yield ("decision", decision_id(owner, path), len(leaves))
        for leaf, lpath in leaves:
            yield ("atom", atom_id(owner, lpath))
            yield from _walk_inside(leaf, owner, lpath)
        return
    yield from _walk_inside(expr, owner, path)


def _walk_inside(expr, owner, path):
    for i, c in enumerate(children(expr)):
        yield from walk(c, owner, f"{path}.{i}", is_decision=isinstance(expr, If) and i == 0)


def transition_owner(component_name, index):
    return f"{component_name}.t{index}"


def function_owner(name):
    return f"fun.{name}"


def model_sites(model):
    """Every (owner, root path, expr, is_guard) whose evaluation is coverage-relevant."""
    for f in model.functions:
        yield function_owner(f.name), "b", f.body, False
    for c in model.components:
        if c.efsm is None:
            continue
        for i, t in enumerate(c.efsm.transitions):
            owner = transition_owner(c.name, i)
            if t.guard is not None:
                yield owner, "g", t.guard, True
            for k, (_, e) in enumerate(t.outputs):
                yield owner, f"o{k}", e, False
            for k, (_, e) in enumerate(t.assigns):
                yield owner, f"a{k}", e, False

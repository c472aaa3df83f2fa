"""Seeded generator of small random models in the .afm syntax.

Used by the round-trip and pruning tests.  Every generated text parses; the
caller filters on validation when it needs an executable model.
"""

import random

from mbtlab.dsl.parser import parse_model
from mbtlab.model.validate import validate_model

TYPES = """\
type T = A | B | C(T)
type U = P | Q(Int)
"""

FUNCS = """\
fun isA(t : T) : Bool = case t of { A -> true; _ -> false }
fun depth(t : T) : Int = case t of { C(s) -> 1 + depth(s); _ -> 0 }
fun clip(n : Int) : Int = if n > 2 then 0 else n
"""

PATTERNS = [("A", None), ("B", None), ("C(y)", "y"), ("y", "y"), ("_", None), ("C(_)", None)]
GUARDS = [
    "x < 2", "b", "!b && x == 0", "x > 0 || b", "isA(y)", "depth(y) >= 1",
    "x % 2 == 1", "!(x == 1)", "true",
]
OUTS = ["A", "B", "C(A)", "C(y)", "y", "if b then A else B", "case y of { C(z) -> z; _ -> A }"]
ASSIGNS = ["x := clip(x + 1)", "b := !b", "b := x > 1", "x := depth(y)", "x := 0"]


def _transition(rng, states, has_in, src=None, dst=None):
    src, dst = src or rng.choice(states), dst or rng.choice(states)
    lines = [f"    trans {src} -> {dst}"]
    bound = None
    if has_in and rng.random() < 0.85:
        pat, bound = rng.choice(PATTERNS)
        lines.append(f"      when i ? {pat}")
    if rng.random() < 0.6:
        g = rng.choice([g for g in GUARDS if bound or "y" not in g])
        lines.append(f"      if {g}")
    if rng.random() < 0.7:
        o = rng.choice([o for o in OUTS if bound or "y" not in o])
        lines.append(f"      then o ! {o}")
    if rng.random() < 0.6:
        picks = rng.sample([a for a in ASSIGNS if bound or "y" not in a], rng.randint(1, 2))
        if len({p.split(" ")[0] for p in picks}) == len(picks):
            lines.append("      set " + ", ".join(picks))
    lines[-1] += ";"
    return "\n".join(lines)


def atomic(rng, name, n_states=None, n_trans=None):
    n_states = n_states or rng.randint(1, 4)
    states = [f"S{k}" for k in range(n_states)]
    # every state can move on to the next one, so deeper states are reachable
    trans = [_transition(rng, states, True, s, states[(k + 1) % n_states])
             for k, s in enumerate(states)]
    trans += [_transition(rng, states, True) for _ in range(n_trans or rng.randint(0, 3))]
    return (
        f"component {name} {{\n"
        "  ports { in i : T; out o : T }\n"
        "  efsm {\n"
        f"    states {', '.join(states)};\n"
        f"    init {states[0]};\n"
        "    local x : Int = 0;\n"
        "    local b : Bool = false;\n"
        + "\n".join(trans)
        + "\n  }\n}\n"
    )


def random_model_text(seed, max_components=4):
    """Text of a model with 1..max_components atomic parts wired in a forest."""
    rng = random.Random(seed)
    n = rng.randint(1, max_components)
    parts = [atomic(rng, f"K{k}") for k in range(n)]
    subs = "; ".join(f"c{k} : K{k}" for k in range(n))
    chans = ["a0 : inp -> c0.i"]
    for k in range(1, n):
        src = rng.randrange(k)
        delayed = " delayed" if rng.random() < 0.3 else ""
        chans.append(f"a{k} : c{src}.o -> c{k}.i{delayed}")
    chans.append(f"z : c{n - 1}.o -> out")
    root = (
        "component Top {\n"
        "  ports { in inp : T; out out : T }\n"
        f"  sub {{ {subs} }}\n"
        "  channels {\n" + "".join(f"    {c};\n" for c in chans) + "  }\n}\n"
    )
    return TYPES + FUNCS + "\n".join(parts) + root


def random_valid_model(seed, max_components=4):
    """First valid model at or after ``seed`` (returns (seed used, Model))."""
    s = seed
    while True:
        m = parse_model(random_model_text(s, max_components))
        if not validate_model(m):
            return s, m
        s += 10_000

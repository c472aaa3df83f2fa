"""Condition/decision coverage universes, maps and ratios."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cdoracle import ATOMS, atom_paths, feed, guard_map, guard_model, oracle, to_text
from mbtlab.coverage import (CoverageMap, case_events, cd_ratio, enumerate_universe, merge,
                             suite_coverage)
from mbtlab.dsl.parser import parse_model, parse_value
from mbtlab.dsl.printer import print_model
from mbtlab.errors import UniverseMismatch, UnknownId
from mbtlab.model import syntax as S
from mbtlab.model.engine import Runtime
from mbtlab.testgen.generate import GenerationConfig, case_from_inputs, generate_D

T, F = True, False


def test_conjunction_has_six_targets():
    assert enumerate_universe(guard_model("p0 && p1")).target == 6


def test_constant_guard_has_four_targets():
    assert enumerate_universe(guard_model("true")).target == 4


def test_single_evaluation_of_conjunction():
    assert cd_ratio(guard_map("p0 && p1", [(T, F, F, F)])) == Fraction(3, 6)


def test_two_evaluations_of_conjunction():
    assert cd_ratio(guard_map("p0 && p1", [(T, T, F, F), (F, F, F, F)])) == Fraction(5, 6)


def test_short_circuit_skips_right_operand():
    ev = feed(Runtime(guard_model("p0 && p1"), instrument=True), [(F, T, F, F)])
    assert ev == {("D:C.t0:g", False), ("A:C.t0:g.0", False)}
    ev = feed(Runtime(guard_model("p0 || p1"), instrument=True), [(T, F, F, F)])
    assert ev == {("D:C.t0:g", True), ("A:C.t0:g.0", True)}


def test_unmatched_pattern_records_nothing():
    rt = Runtime(guard_model("p0"), instrument=True)
    ev = set()
    rt.step(rt.initial_state(), {"i": parse_value("ε")}, cov=ev)
    assert ev == set()


def test_recording_is_idempotent():
    m = guard_map("p0 || p1", [(F, T, F, F)])
    twice = m.copy().record_all(m.events())
    assert twice == m


def test_empty_and_full_maps():
    u = enumerate_universe(guard_model("p0 && (p1 || !p2)"))
    empty = CoverageMap(u)
    assert cd_ratio(empty) == 0
    full = CoverageMap(u).record_all((i, b) for i in u.ids for b in (T, F))
    assert cd_ratio(full) == 1


def test_unknown_id_is_rejected():
    with pytest.raises(UnknownId):
        CoverageMap(enumerate_universe(guard_model("p0"))).record("D:nope:g", True)


def test_merge_needs_one_universe():
    a = CoverageMap(enumerate_universe(guard_model("p0")))
    b = CoverageMap(enumerate_universe(guard_model("p0 && p1")))
    with pytest.raises(UniverseMismatch):
        merge(a, b)


# -- brute-force oracle -------------------------------------------------------


def expr_tree(max_atoms=4):
    leaf = st.sampled_from(ATOMS).map(lambda a: ("atom", a))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            sub.map(lambda t: ("not", t)),
            st.tuples(st.sampled_from(["and", "or"]), sub, sub),
        ),
        max_leaves=max_atoms,
    )


valuations = st.lists(st.tuples(*[st.booleans()] * 4), max_size=6)


@given(expr_tree(), valuations)
def test_coverage_matches_the_event_log_oracle(t, vals):
    cmap = guard_map(to_text(t), vals)
    log, ratio = oracle(t, vals)
    assert cmap.events() == log
    assert cd_ratio(cmap) == ratio


@given(expr_tree())
def test_universe_lists_the_decision_and_its_atoms(t):
    u = enumerate_universe(guard_model(to_text(t)))
    assert u.ids == ["D:C.t0:g"] + [f"A:C.t0:{p}" for p in atom_paths(t)]


# -- merge and monotonicity ---------------------------------------------------


def random_map(universe, rng):
    m = CoverageMap(universe)
    for ident in universe.ids:
        for b in (T, F):
            if rng.random() < 0.4:
                m.record(ident, b)
    return m


@given(st.integers(0, 10**6))
def test_merge_is_a_join(demo_model, seed):
    rng = random.Random(seed)
    u = enumerate_universe(demo_model)
    a, b, c = (random_map(u, rng) for _ in range(3))
    assert merge(a, b) == merge(b, a)
    assert merge(merge(a, b), c) == merge(a, merge(b, c))
    assert merge(a, a) == a
    assert cd_ratio(merge(a, b)) >= max(cd_ratio(a), cd_ratio(b))


DEMO_INPUTS = ["ε", "PowerOn", "PowerOff", "NodeAnswer(N1, FCons(Amp, FNil))",
               "NodeError(N2, AddrCollision)", "TimerExpired", "NodeJoin(N2)", "RegQuery",
               "RegNext", "Lookup(Amp)", "NodeAnswer(N2, FNil)", "NodeAnswer(N3, FNil)"]


@given(st.lists(st.lists(st.sampled_from(DEMO_INPUTS), min_size=1, max_size=12),
                min_size=1, max_size=5))
def test_adding_cases_never_lowers_coverage(demo_rt, demo_irt, runs):
    u = enumerate_universe(demo_rt.model)
    cases = [case_from_inputs(demo_rt, [{"inp": parse_value(x)} for x in xs], f"c{k}")
             for k, xs in enumerate(runs)]
    ratios = [cd_ratio(suite_coverage(demo_irt, u, cases[:k])) for k in range(len(cases) + 1)]
    assert ratios == sorted(ratios)


def test_cache_does_not_change_the_result(demo_rt, demo_irt):
    u = enumerate_universe(demo_rt.model)
    suite = generate_D(demo_rt, 10, None, GenerationConfig(postamble=False), seed=1)
    cache = {}
    a = suite_coverage(demo_irt, u, suite.cases, cache)
    b = suite_coverage(demo_irt, u, suite.cases, cache)
    assert a == b == suite_coverage(demo_irt, u, suite.cases)
    assert cache[suite.cases[0].id] == case_events(demo_irt, suite.cases[0])


def test_universe_survives_printing(demo_model, demo_sut):
    for m in (demo_model, demo_sut):
        assert enumerate_universe(parse_model(print_model(m))) == enumerate_universe(m)


# -- demo universe against an independent count -------------------------------


def _is_bool_op(e):
    return (type(e).__name__ == "Binary" and e.op in ("&&", "||")) or (
        type(e).__name__ == "Unary" and e.op == "!")


def _subexprs(e):
    if isinstance(e, S.If):
        return [e.cond, e.then, e.orelse]
    if isinstance(e, S.Case):
        return [e.scrutinee] + [body for _, body in e.arms]
    if isinstance(e, S.Binary):
        return [e.left, e.right]
    if isinstance(e, S.Unary):
        return [e.operand]
    return list(getattr(e, "args", ()))


def _count(e, decision):
    """(decisions, atoms) below ``e``; ``decision`` marks a guard or if-condition."""
    if decision or _is_bool_op(e):
        leaves, stack = [], [e]
        while stack:
            x = stack.pop()
            if _is_bool_op(x):
                stack.extend(_subexprs(x))
            else:
                leaves.append(x)
        d, a = 1, len(leaves)
        for leaf in leaves:
            dd, aa = _inside(leaf)
            d, a = d + dd, a + aa
        return d, a
    return _inside(e)


def _inside(e):
    d = a = 0
    for i, c in enumerate(_subexprs(e)):
        dd, aa = _count(c, isinstance(e, S.If) and i == 0)
        d, a = d + dd, a + aa
    return d, a


def independent_count(model):
    d = a = 0
    roots = [(f.body, False) for f in model.functions]
    for c in model.components:
        if c.efsm is None:
            continue
        for t in c.efsm.transitions:
            if t.guard is not None:
                roots.append((t.guard, True))
            roots += [(e, False) for _, e in t.outputs]
            roots += [(e, False) for _, e in t.assigns]
    for e, guard in roots:
        dd, aa = _count(e, guard)
        d, a = d + dd, a + aa
    return d, a


def test_demo_universe_size(demo_model):
    u = enumerate_universe(demo_model)
    assert independent_count(demo_model) == (len(u.decisions), len(u.atoms)) == (30, 40)
    assert u.target == 140

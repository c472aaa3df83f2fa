"""Evaluation, matching, validation and synchronous stepping."""

import dataclasses
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import HAPPY
from mbtlab.dsl.parser import parse_expr, parse_model, parse_pattern, parse_value
from mbtlab.errors import FuelExhausted, NondeterminismInStrictMode, StepError
from mbtlab.model.engine import Runtime, enabled, run, step
from mbtlab.model.evaluator import evaluate, match
from mbtlab.model.types import Signature, has_type
from mbtlab.model.validate import validate_model
from mbtlab.model.values import ABSENT, Con

LISTS = """
type L = Nil | Cons(Item, L)
type Item = A | B
fun len(l : L) : Int = case l of { Nil -> 0; Cons(h, t) -> 1 + len(t) }
fun loop() : Int = loop()
"""

ADDER = """
type Msg = Go
component Src {
  ports { in i : Msg; out n : Int }
  efsm { states S; init S; trans S -> S when i ? Go then n ! 1; }
}
component Dst {
  ports { in b : Bool; out o : Msg }
  efsm { states S; init S; trans S -> S when b ? true then o ! Go; }
}
component Top {
  ports { in i : Msg; out o : Msg }
  sub { s : Src; d : Dst }
  channels { a : i -> s.i; bad : s.n -> d.b; z : d.o -> o; }
}
"""

CYCLE = """
type Msg = Go
component P {
  ports { in i : Msg; out o : Msg }
  efsm { states S; init S; trans S -> S when i ? Go then o ! Go; }
}
component Top {
  ports { in x : Msg }
  sub { p : P; q : P }
  channels { pq : p.o -> q.i; qp : q.o -> p.i; }
}
"""

COUNTER = """
type Msg = Tick
component Cnt {
  ports { in i : Msg; out o : Int }
  efsm {
    states S;
    init S;
    local x : Int = 0;
    trans S -> S when i ? Tick if x > 0 then o ! x set x := x - 1;
    trans S -> S when i ? Tick if x == 0 then o ! 0 set x := 0;
  }
}
"""


@pytest.fixture(scope="module")
def lists():
    return parse_model(LISTS)


def _val(text):
    return parse_value(text)


# -- eval ---------------------------------------------------------------------


def test_eval_builtin_and():
    assert evaluate(parse_expr("and(true, false)"), {}) is False


def test_eval_recursive_len(lists):
    e = parse_expr("len(Cons(A, Cons(B, Nil)))", lists.constructors())
    assert evaluate(e, {}, lists) == 2


def test_eval_diverging_function_runs_out_of_fuel(lists):
    with pytest.raises(FuelExhausted):
        evaluate(parse_expr("loop()"), {}, lists, fuel=1000)


def test_eval_integers_are_unbounded():
    assert evaluate(parse_expr("x * x * x"), {"x": 10**12}) == 10**36


@given(st.integers(0, 30), st.integers(1, 400), st.integers(0, 400))
def test_fuel_monotonicity(n, fuel, extra):
    m = parse_model(LISTS)
    items = "Nil"
    for _ in range(n):
        items = f"Cons(A, {items})"
    e = parse_expr(f"len({items})", m.constructors())
    try:
        r = evaluate(e, {}, m, fuel=fuel)
    except FuelExhausted:
        return
    assert evaluate(e, {}, m, fuel=fuel + extra) == r == n


# -- match --------------------------------------------------------------------


def test_match_binds_constructor_argument():
    assert match(parse_pattern("Req(x)", {"Req"}), Con.make("Req", [5])) == {"x": 5}


def test_match_wrong_constructor():
    assert match(parse_pattern("Req(x)", {"Req", "Ack"}), Con.make("Ack")) is None


def test_wildcard_does_not_match_absent_but_epsilon_does():
    assert match(parse_pattern("_"), ABSENT) is None
    assert match(parse_pattern("ε"), ABSENT) == {}


# -- validation ---------------------------------------------------------------


def test_valid_toy_has_no_diagnostics(toy_text):
    assert validate_model(parse_model(toy_text)) == []


def test_int_to_bool_channel_is_one_type_diagnostic():
    diags = validate_model(parse_model(ADDER))
    assert len(diags) == 1 and diags[0].code == "type-mismatch"


def test_zero_delay_cycle_is_one_causality_diagnostic():
    diags = validate_model(parse_model(CYCLE))
    assert [d.code for d in diags] == ["causality-cycle"]


def test_delayed_channel_breaks_the_cycle():
    text = CYCLE.replace("qp : q.o -> p.i;", "qp : q.o -> p.i delayed;")
    assert validate_model(parse_model(text)) == []


# -- enabled / step / run -----------------------------------------------------


def test_enabled_on_matching_input(toy_text):
    m = parse_model(toy_text)
    efsm = m.component("Lamp").efsm
    assert enabled(efsm, "Off", {}, {"i": _val("SwitchOn")}) == [efsm.transitions[0]]


def test_enabled_on_absent_input_is_empty(toy_text):
    efsm = parse_model(toy_text).component("Lamp").efsm
    assert enabled(efsm, "Off", {}, {"i": ABSENT}) == []


def test_guard_blocks_even_when_pattern_matches():
    m = parse_model("""
type Msg = Go
component C {
  ports { in i : Msg; out o : Msg }
  efsm { states S; init S; local x : Int = 0; trans S -> S when i ? Go if x > 0 then o ! Go; }
}""")
    assert enabled(m.component("C").efsm, "S", {"x": 0}, {"i": _val("Go")}) == []


def test_step_fires_transition(toy_text):
    m = parse_model(toy_text)
    rt = Runtime(m)
    state, out = step(m, rt.initial_state(), {"i": _val("SwitchOn")})
    assert state.control == ("On",) and out == {"o": _val("Ack")}


def test_step_stutters_on_absent_input(toy_text):
    m = parse_model(toy_text)
    s0 = Runtime(m).initial_state()
    s1, out = step(m, s0, {})
    assert s1 == s0 and out == {"o": ABSENT}


def test_run_empty_inputs(toy_text):
    assert run(parse_model(toy_text), []) == []


def test_run_two_ticks_second_stutters(toy_text):
    tr = run(parse_model(toy_text), [{"i": _val("SwitchOn")}, {}])
    assert len(tr) == 2
    assert tr[1].state == tr[0].state and tr[1].outputs == {"o": ABSENT}


def test_demo_power_on(demo_rt):
    s, out = demo_rt.step(demo_rt.initial_state(), {"inp": _val("PowerOn")})
    assert demo_rt.control_of(s, "reg") == "SystemConfigCheck"
    assert out["toNodes"] == _val("ConfigRequest(NCons(N1, NCons(N2, NCons(N3, NNil))))")


def test_demo_happy_path_reaches_normal_operation(demo_rt):
    tr = demo_rt.run([{"inp": _val(x)} for x in HAPPY])
    assert demo_rt.control_of(tr[-1].state, "reg") == "ConfigurationStatusOk"
    assert tr[-1].outputs["toApp"] == _val("NetUp")


def test_strict_mode_rejects_nondeterminism():
    m = parse_model("""
type Msg = Go
component C {
  ports { in i : Msg; out o : Int }
  efsm { states S; init S; trans S -> S when i ? Go then o ! 1; trans S -> S when i ? x then o ! 2; }
}""")
    rt = Runtime(m)
    with pytest.raises(NondeterminismInStrictMode):
        rt.step(rt.initial_state(), {"i": _val("Go")})
    s, out = rt.step(rt.initial_state(), {"i": _val("Go")}, mode="random", rng=random.Random(1))
    assert out["o"] in (1, 2)


def test_run_reports_the_failing_tick():
    rt = Runtime(parse_model(COUNTER))
    with pytest.raises(StepError) as exc:
        rt.run([{"i": _val("Tick")}, {"j": _val("Tick")}])
    assert exc.value.tick == 1


# -- properties ---------------------------------------------------------------

DEMO_INPUTS = [
    "ε", "PowerOn", "PowerOff", "NodeAnswer(N1, FCons(Amp, FNil))",
    "NodeAnswer(N2, FNil)", "NodeAnswer(N3, FCons(Nav, FCons(Amp, FNil)))",
    "NodeError(N2, AddrCollision)", "NodeError(N1, AnyNodeError)", "TimerExpired",
    "NodeJoin(N2)", "NodeLeave(N3)", "Spontaneous(N1, FCons(CdPlayer, FNil))",
    "Lookup(Amp)", "RegQuery", "RegNext", "RingBreak",
]
demo_inputs = st.lists(st.sampled_from(DEMO_INPUTS), max_size=25).map(
    lambda xs: [{"inp": _val(x)} for x in xs]
)


@given(demo_inputs)
def test_strict_runs_are_deterministic(demo_rt, inputs):
    a = demo_rt.run(inputs)
    b = Runtime(demo_rt.model).run(inputs)
    assert [(s.state, s.outputs) for s in a] == [(s.state, s.outputs) for s in b]


@given(demo_inputs)
def test_outputs_and_locals_are_well_typed(demo_rt, inputs):
    sig = Signature(demo_rt.model)
    ports = {p.name: p.type for p in demo_rt.model.root().ports}
    for s in demo_rt.run(inputs):
        for name, v in s.outputs.items():
            assert v is ABSENT or has_type(v, ports[name], sig)
        for a, vals in zip(demo_rt.atomics, s.state.locals):
            for decl, v in zip(a.component.efsm.locals, vals):
                assert has_type(v, decl.type, sig)


@given(st.lists(st.sampled_from(["ε", "SwitchOn", "SwitchOff", "Ack"]), max_size=20))
def test_step_is_total(toy_text, xs):
    rt = Runtime(parse_model(toy_text))
    state = rt.initial_state()
    for x in xs:
        state, _ = rt.step(state, {"i": _val(x)})
    assert state.control[0] in ("On", "Off")


@given(st.permutations(range(4)), demo_inputs)
def test_component_order_does_not_matter(demo_model, perm, inputs):
    root = demo_model.root()
    shuffled = dataclasses.replace(root, subs=tuple(root.subs[i] for i in perm))
    comps = tuple(shuffled if c.name == root.name else c for c in demo_model.components)
    other = Runtime(dataclasses.replace(demo_model, components=comps))
    base = Runtime(demo_model)
    assert [s.outputs for s in base.run(inputs)] == [s.outputs for s in other.run(inputs)]

"""Write the hand-written suites A, E, F and G shipped with the package.

Each case is an input script written by hand.  Expected outputs are filled in
by running the abstract model, and the observation postamble is appended, so
the files can be executed by the harness like generated suites.

    python demos/author_manual_suites.py [outdir]
"""

import os
import sys

from mbtlab.dsl.parser import parse_value
from mbtlab.dsl.suites import write_suite
from mbtlab.model.engine import Runtime
from mbtlab.resources import load_demo_model, data_path
from mbtlab.suite import Suite, model_hash
from mbtlab.testgen.generate import case_from_inputs
from mbtlab.testgen.postamble import add_postamble

AMP = "FCons(Amp, FNil)"
CD = "FCons(CdPlayer, FNil)"
NAV = "FCons(Nav, FNil)"
AMP_CD = "FCons(Amp, FCons(CdPlayer, FNil))"
CD_NAV = "FCons(CdPlayer, FCons(Nav, FNil))"
ALL3 = "FCons(Amp, FCons(CdPlayer, FCons(Nav, FNil)))"

UP = ["PowerOn", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {CD})", f"NodeAnswer(N3, {NAV})"]

# model-guided: one scenario per branch of the registry manager's state machine
A = [
    UP + ["Lookup(Amp)", "Lookup(Nav)", "RegQuery", "RegNext"],
    UP + ["NodeLeave(N2)", "Lookup(CdPlayer)", "NodeJoin(N2)", f"NodeAnswer(N2, {CD_NAV})", "Lookup(CdPlayer)"],
    ["PowerOn", "NodeError(N1, AddrCollision)", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {CD})",
     f"NodeAnswer(N3, {NAV})", "Lookup(Amp)", "ε", "ε"],
    ["PowerOn", "NodeError(N2, AddrCollision)", "NodeError(N3, AddrCollision)",
     "NodeError(N1, AddrCollision)", "Lookup(Amp)", "PowerOn", f"NodeAnswer(N1, {ALL3})", "ε"],
    ["PowerOn", f"NodeAnswer(N1, {AMP})", "TimerExpired", f"NodeAnswer(N2, {CD})", "TimerExpired",
     "Lookup(Amp)", "Lookup(CdPlayer)", "RegQuery", "RegNext"],
    ["PowerOn", "TimerExpired", "TimerExpired", "Lookup(Amp)", "PowerOn", f"NodeAnswer(N3, {NAV})",
     f"NodeAnswer(N2, {CD})", f"NodeAnswer(N1, {AMP})"],
    ["PowerOn", "NodeError(N3, AnyNodeError)", f"NodeAnswer(N1, {AMP_CD})", f"NodeAnswer(N2, {NAV})",
     "Lookup(Nav)", "RegQuery", "RegNext", "RegNext"],
    ["PowerOn", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {CD})", "NodeError(N3, AnyNodeError)",
     "Lookup(Nav)", "Lookup(Amp)", "ε", "ε"],
    UP + ["NodeError(N1, AddrCollision)", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {CD})",
          f"NodeAnswer(N3, {NAV})", "Lookup(Amp)"],
    UP + ["NodeError(N2, AnyNodeError)", "Lookup(CdPlayer)", "RegQuery", "RegNext"],
    UP + [f"Spontaneous(N1, {AMP_CD})", "Lookup(CdPlayer)", "RegQuery", "RegNext", "RegNext"],
    UP + ["NodeLeave(N3)", f"Spontaneous(N3, {NAV})", f"NodeAnswer(N3, {NAV})", "Lookup(Nav)"],
    UP + ["RingBreak", "Lookup(Amp)", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {CD})",
          f"NodeAnswer(N3, {NAV})", "Lookup(Amp)"],
    ["PowerOn", f"NodeAnswer(N1, {AMP})", "RingBreak", f"NodeAnswer(N1, {AMP})",
     f"NodeAnswer(N2, {CD})", f"NodeAnswer(N3, {NAV})", "Lookup(Amp)", "ε"],
    ["PowerOn", f"NodeAnswer(N1, {AMP})", "PowerOff", "Lookup(Amp)", "PowerOn",
     f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {CD})", f"NodeAnswer(N3, {NAV})"],
    UP + ["PowerOff", "Lookup(Amp)", "RegQuery", "RegNext"],
    ["Lookup(Amp)", "RegQuery", "RegNext", "PowerOn", f"NodeAnswer(N1, {AMP})",
     f"NodeAnswer(N2, {CD})", f"NodeAnswer(N3, {NAV})", "Lookup(Amp)"],
    UP + ["NodeLeave(N1)", "NodeLeave(N2)", "NodeJoin(N1)", "TimerExpired", "TimerExpired", "Lookup(Amp)"],
    ["PowerOn", f"NodeAnswer(N1, {ALL3})", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {ALL3})",
     f"NodeAnswer(N3, {ALL3})", "RegQuery", "RegNext", "RegNext", "RegNext"],
    UP + [f"Spontaneous(N2, {CD})", "NodeError(N3, AddrCollision)", "NodeError(N1, AnyNodeError)",
          f"NodeAnswer(N2, {CD})", f"NodeAnswer(N3, {NAV})", "Lookup(Nav)"],
]

# no model: basic service checks written from the interface description
E = [
    UP + ["Lookup(Amp)", "Lookup(CdPlayer)", "Lookup(Nav)", "ε"],
    ["Lookup(Nav)", "PowerOn", "Lookup(Nav)"] + UP[1:] + ["Lookup(Nav)", "ε"],
    UP + ["RegQuery", "RegNext", "RegNext", "RegNext"],
    ["PowerOn", f"NodeAnswer(N1, {ALL3})", f"NodeAnswer(N2, FNil)", f"NodeAnswer(N3, FNil)",
     "Lookup(Amp)", "Lookup(Nav)", "ε", "ε"],
    UP + ["PowerOff", "Lookup(Amp)", "ε", "ε"],
    ["RegQuery", "RegNext", "ε", "PowerOn", "RegQuery", "RegNext", "ε", "ε"],
    UP + ["Lookup(Amp)", "PowerOff", "PowerOn", "Lookup(Amp)"],
    ["PowerOn", f"NodeAnswer(N2, {AMP_CD})", f"NodeAnswer(N3, {AMP})", f"NodeAnswer(N1, {NAV})",
     "Lookup(Amp)", "Lookup(CdPlayer)", "RegQuery", "RegNext"],
    ["PowerOn", "PowerOn", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N1, {AMP})",
     f"NodeAnswer(N2, {CD})", f"NodeAnswer(N3, {NAV})", "Lookup(Amp)", "ε"],
    UP + ["RegQuery", "Lookup(Amp)", "RegNext", "RegNext"],
]

# no model: topology changes
F = [
    UP + ["NodeLeave(N1)", "Lookup(Amp)", "ε", "ε"],
    UP + ["NodeLeave(N1)", "NodeJoin(N1)", f"NodeAnswer(N1, {AMP})", "Lookup(Amp)"],
    UP + ["NodeJoin(N2)", "Lookup(CdPlayer)", "ε", "ε"],
    UP + ["NodeLeave(N3)", "NodeLeave(N2)", "RegQuery", "RegNext", "RegNext"],
    UP + ["NodeLeave(N2)", f"Spontaneous(N2, {CD})", "TimerExpired", "TimerExpired", "Lookup(CdPlayer)"],
    UP + [f"Spontaneous(N3, {ALL3})", "Lookup(Amp)", "RegQuery", "RegNext", "RegNext", "RegNext"],
    UP + ["NodeLeave(N1)", "NodeLeave(N1)", "NodeJoin(N1)", f"NodeAnswer(N1, {AMP_CD})", "Lookup(CdPlayer)"],
    UP + ["RingBreak", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N2, {CD})", f"NodeAnswer(N3, {NAV})"],
    UP + ["NodeLeave(N2)", "NodeJoin(N2)", "TimerExpired", "TimerExpired", "Lookup(CdPlayer)"],
    UP + [f"Spontaneous(N1, {AMP})", f"Spontaneous(N1, {NAV})", "Lookup(Nav)", "ε"],
    UP + ["NodeLeave(N3)", "NodeJoin(N3)", f"NodeAnswer(N3, {CD})", "RegQuery", "RegNext", "RegNext"],
    ["PowerOn", f"NodeAnswer(N1, {AMP})", "NodeJoin(N2)", f"NodeAnswer(N2, {CD})",
     f"NodeAnswer(N3, {NAV})", "NodeLeave(N1)", "Lookup(Amp)", "ε"],
]

# no model: error handling
G = [
    ["PowerOn", "NodeError(N1, AddrCollision)", "ε"] + UP[1:] + ["Lookup(Amp)", "ε"],
    ["PowerOn", "NodeError(N1, AddrCollision)", "NodeError(N1, AddrCollision)",
     "NodeError(N1, AddrCollision)", "Lookup(Amp)", "ε", "ε", "ε"],
    ["PowerOn", "NodeError(N2, AnyNodeError)", f"NodeAnswer(N1, {AMP})", f"NodeAnswer(N3, {NAV})",
     "Lookup(CdPlayer)", "ε", "ε", "ε"],
    ["PowerOn", "TimerExpired", f"NodeAnswer(N1, {AMP})", "TimerExpired", "Lookup(Amp)", "ε", "ε", "ε"],
    ["PowerOn", "TimerExpired", "TimerExpired", "Lookup(Amp)", "ε", "ε", "ε", "ε"],
    UP + ["NodeError(N2, AnyNodeError)", "NodeError(N2, AnyNodeError)", "Lookup(CdPlayer)", "ε"],
    UP + ["NodeError(N1, AddrCollision)", "TimerExpired", "TimerExpired", "Lookup(Amp)"],
    ["PowerOn", "NodeError(N1, AnyNodeError)", "NodeError(N2, AnyNodeError)",
     "NodeError(N3, AnyNodeError)", "Lookup(Amp)", "RegQuery", "RegNext", "ε"],
    ["PowerOn", f"NodeAnswer(N1, {AMP})", "NodeError(N1, AnyNodeError)", f"NodeAnswer(N2, {CD})",
     f"NodeAnswer(N3, {NAV})", "Lookup(Amp)", "ε", "ε"],
    ["NodeError(N1, AddrCollision)", "TimerExpired", "PowerOn", "TimerExpired",
     f"NodeAnswer(N3, {NAV})", "TimerExpired", "Lookup(Nav)", "ε"],
    UP + ["RingBreak", "TimerExpired", "TimerExpired", "Lookup(Amp)"],
    ["PowerOn", "NodeError(N3, AddrCollision)", "TimerExpired", "NodeError(N3, AddrCollision)",
     f"NodeAnswer(N1, {AMP})", "TimerExpired", "TimerExpired", "Lookup(Amp)"],
    UP + ["NodeError(N3, AnyNodeError)", "NodeLeave(N3)", "NodeJoin(N3)", "TimerExpired",
          "TimerExpired", "Lookup(Nav)"],
    ["PowerOn", f"NodeAnswer(N1, {AMP})", "PowerOff", "NodeError(N1, AddrCollision)", "TimerExpired",
     "PowerOn", "NodeError(N2, AnyNodeError)", "Lookup(Amp)"],
]


def build(rt, kind, scripts):
    cases = []
    for i, script in enumerate(scripts, 1):
        inputs = [{"inp": parse_value(s)} for s in script]
        case = case_from_inputs(rt, inputs, f"{kind}-{i:02d}", {"kind": kind, "author": "hand"})
        cases.append(add_postamble(case, rt))
    return Suite(model_hash(rt.model), {"kind": kind, "seed": None}, tuple(cases))


def main(outdir=None):
    outdir = outdir or data_path("manual")
    os.makedirs(outdir, exist_ok=True)
    rt = Runtime(load_demo_model())
    for kind, scripts in (("A", A), ("E", E), ("F", F), ("G", G)):
        suite = build(rt, kind, scripts)
        write_suite(suite, os.path.join(outdir, f"{kind}.suite.json"))
        print(f"{kind}: {len(suite.cases)} cases")


if __name__ == "__main__":
    main(*sys.argv[1:])

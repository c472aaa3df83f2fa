"""Rebuild the seeded-fault manifest shipped as ``mutants.json``.

Mutants are taken by seed, four per operator, skipping any that behave like
the base SUT on a probe of 200 random-input and 100 random-trace cases.

    python demos/build_mutant_manifest.py [out.json]
"""

import sys

from mbtlab.dsl.parser import parse_value_pattern
from mbtlab.harness.adapter import read_adapter
from mbtlab.harness.mutate import mutant_set, probe_ticks, write_manifest
from mbtlab.model.engine import Runtime
from mbtlab.resources import data_path, load_demo_model, load_demo_sut
from mbtlab.testgen.generate import GenerationConfig, generate_C, generate_D
from mbtlab.testgen.spec import Event, TestSpec, WithinSteps

PROBE_SEED = 999


def main(out):
    model, sut = load_demo_model(), load_demo_sut()
    rt = Runtime(model)
    adapter = read_adapter(data_path("adapter.json"), model, sut)
    sanity = TestSpec("sanity", WithinSteps(Event("inp", parse_value_pattern("PowerOn")), 1, 1))
    probe = (generate_D(rt, 200, sanity, GenerationConfig(), seed=PROBE_SEED).cases
             + generate_C(rt, 100, GenerationConfig(), seed=PROBE_SEED).cases)
    muts = mutant_set(sut, probe_ticks(adapter, probe))
    write_manifest(muts, sut, out)
    for m in muts:
        print(m.id, m.operator, m.location)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "mutants.json")

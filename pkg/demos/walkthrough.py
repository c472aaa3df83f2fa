"""A short tour of the library on the shipped network-master demo.

Validates the model, generates spec-guided cases for the reset family, runs
them against the concrete SUT and a mutant with a negated collision guard,
and prints the model coverage they reach.

    python demos/walkthrough.py
"""

from mbtlab.coverage import cd_ratio, enumerate_universe, suite_coverage
from mbtlab.dsl.suites import load_specs
from mbtlab.harness.adapter import read_adapter
from mbtlab.harness.execute import classify, run_suite
from mbtlab.harness.mutate import locations
from mbtlab.harness.sut import ModelSut
from mbtlab.model.engine import Runtime
from mbtlab.model.validate import validate_model
from mbtlab.resources import data_path, load_demo_model, load_demo_sut
from mbtlab.testgen.generate import GenerationConfig, generate_B


def main():
    model, sut = load_demo_model(), load_demo_sut()
    print("diagnostics:", validate_model(model) or "none")
    rt = Runtime(model)
    adapter = read_adapter(data_path("adapter.json"), model, sut)

    specs = load_specs(data_path("specs", "ts4.spec.json"))
    suite = generate_B(rt, specs, GenerationConfig(seed_count=2, per_seed_pick=2), seed=0)
    print(f"generated {len(suite.cases)} cases for {len(specs)} reset specs")

    verdicts, _ = run_suite(ModelSut(sut), adapter, suite.cases, rt)
    print(f"unmutated SUT: {sum(v.passed for v in verdicts)}/{len(verdicts)} passed")

    mutant = dict(locations(sut, "GuardNegate"))["RegistryMgr.t3.guard"](sut)
    verdicts, _ = run_suite(ModelSut(mutant), adapter, suite.cases, rt)
    classes = classify(verdicts)
    print(f"negated collision guard: {sum(not v.passed for v in verdicts)}/{len(verdicts)} "
          f"failed in {len(classes)} class(es)")
    for sig, members in classes.items():
        print(f"  {len(members)} x {sig}")

    universe = enumerate_universe(model)
    cmap = suite_coverage(Runtime(model, instrument=True), universe, suite.cases)
    print(f"model C/D coverage: {float(cd_ratio(cmap)):.3f} of {universe.target} targets")


if __name__ == "__main__":
    main()

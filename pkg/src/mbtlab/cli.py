"""The ``mbt`` command line.

Exit codes: 0 ok, 1 test failures present, 2 usage or configuration error,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import traceback

from .errors import MbtError, StepError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _model(path):
    from .model.validate import ensure_valid
    from .resources import read_model

    m = read_model(path)
    ensure_valid(m)
    return m


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args):
    from .model.validate import validate_model
    from .resources import read_model

    diags = validate_model(read_model(args.model))
    for d in diags:
        print(d)
    if diags:
        return EXIT_USAGE
    print(f"{args.model}: ok")
    return EXIT_OK


def _read_inputs(path, rt):
    from .dsl.parser import parse_value

    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        # one tick per line: "port=value, port=value" or a bare value for a single port
        doc = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line and len(rt.in_ports) == 1:
                doc.append({rt.in_ports[0]: line})
            else:
                doc.append(dict(part.split("=", 1) for part in line.split(";")))
    return [{k.strip(): parse_value(v) for k, v in tick.items()} for tick in doc]


def cmd_sim(args):
    from .model.engine import Runtime
    from .model.values import format_value

    rt = Runtime(_model(args.model), fuel=args.fuel)
    inputs = _read_inputs(args.inputs, rt)
    state = rt.initial_state()
    for i, inp in enumerate(inputs):
        try:
            state, out = rt.step(state, inp)
        except StepError as exc:
            raise exc.at_tick(i)
        line = {
            "tick": i,
            "inputs": {k: format_value(v) for k, v in sorted(inp.items())},
            "outputs": {k: format_value(v) for k, v in sorted(out.items())},
            "control": list(rt.control_labels(state)),
        }
        print(json.dumps(line, ensure_ascii=False))
    return EXIT_OK


def cmd_gen(args):
    from .dsl.suites import load_specs, print_suite
    from .model.engine import Runtime
    from .testgen.generate import GenerationConfig, generate_B, generate_C, generate_D

    rt = Runtime(_model(args.model), fuel=args.fuel)
    cfg = GenerationConfig(
        len_min=args.len_min, len_max=args.len_max, depth=args.depth, seed_count=args.seed_count,
        per_seed_pick=args.per_seed_pick, node_budget=args.node_budget, fuel=args.fuel,
        max_wall_time=args.max_wall_time, keep_going=args.keep_going,
        postamble=not args.no_postamble,
    )
    specs = [s for p in args.spec for s in load_specs(p)]
    if args.kind == "B":
        if not specs:
            raise SystemExit(_usage("gen --kind B needs at least one --spec"))
        suite = generate_B(rt, specs, cfg, args.seed)
    elif args.kind == "C":
        suite = generate_C(rt, args.n, cfg, args.seed)
    else:
        if len(specs) > 1:
            raise SystemExit(_usage("gen --kind D takes at most one sanity --spec"))
        suite = generate_D(rt, args.n, specs[0] if specs else None, cfg, args.seed)
    _emit(print_suite(suite), args.out)
    if args.out:
        g = suite.generator
        print(f"{len(suite.cases)} cases written to {args.out} "
              f"(duplicates dropped {g['duplicates_dropped']}, timed out {g['timed_out']})",
              file=sys.stderr)
    return EXIT_OK


def _usage(msg):
    print(f"mbt: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def cmd_run(args):
    from .dsl.suites import read_suite
    from .harness.adapter import read_adapter
    from .harness.execute import classify, run_suite, write_verdicts
    from .harness.sut import ExternalSut, ModelSut
    from .model.engine import Runtime
    from .resources import data_path
    from .suite import model_hash

    suite = read_suite(args.suite)
    model = _model(args.model or data_path("netmaster.afm"))

    if model_hash(model) != suite.model_hash:
        print("warning: suite was generated from a different model", file=sys.stderr)
    if args.sut.startswith("exec:"):
        sut = ExternalSut(shlex.split(args.sut[5:]))
        # adapter templates name concrete constructors, so a declaration is still needed
        concrete = _model(args.concrete or data_path("netmaster_sut.afm"))
    else:
        concrete = _model(args.sut)
        sut = ModelSut(concrete, fuel=args.fuel)
    adapter = read_adapter(args.adapter, model, concrete)
    verdicts, _ = run_suite(sut, adapter, suite.cases, Runtime(model, fuel=args.fuel))
    if args.verdicts:
        write_verdicts(verdicts, args.verdicts)
    failed = [v for v in verdicts if not v.passed]
    print(f"{len(verdicts) - len(failed)}/{len(verdicts)} passed")
    for sig, members in classify(verdicts).items():
        print(f"  class {' | '.join(sig)}: {len(members)} failing case(s), e.g. {members[0].case_id}")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_cover(args):
    from .coverage import cd_ratio, enumerate_universe, suite_coverage
    from .dsl.suites import read_suite
    from .model.engine import Runtime

    model = _model(args.model)
    universe = enumerate_universe(model)
    rt = Runtime(model, fuel=args.fuel, instrument=True)
    cmap = suite_coverage(rt, universe, read_suite(args.suite).cases)
    if args.json:
        cmap.write(args.json)
    if args.csv:
        _emit(cmap.to_csv(), args.csv)
    r = cd_ratio(cmap)
    print(f"C/D coverage {float(r):.4f} ({r.numerator}/{r.denominator}; "
          f"{len(universe.decisions)} decisions, {len(universe.atoms)} atoms)")
    return EXIT_OK


def cmd_mutate(args):
    from .dsl.printer import print_model
    from .harness.mutate import mutate

    mut = mutate(_model(args.model), args.op, args.seed)
    _emit(print_model(mut.model), args.out)
    print(f"{mut.operator} at {mut.location}", file=sys.stderr)
    return EXIT_OK


FULL_SIZES = {"B": 150, "C": 150, "D": 150}


def cmd_lab(args):
    from .lab.experiment import LabConfig, emit_report, run_lab, summarize

    cfg = LabConfig.read(args.config)
    if args.full_sizes:
        for s in cfg.suites:
            if s["kind"] in FULL_SIZES and not s.get("pool"):
                s["n"] = FULL_SIZES[s["kind"]]
        cfg.pools = {"C": 600, "D": 450}
    out = args.out or cfg.path(cfg.out)
    report = run_lab(cfg)
    emit_report(report, out)
    print(summarize(report))
    print(f"report written to {out}")
    return EXIT_OK


def cmd_report(args):
    from .lab.experiment import load_report, summarize

    print(summarize(load_report(args.dir)))
    return EXIT_OK


# -- wiring ---------------------------------------------------------------------


def build_parser():
    from .model.evaluator import DEFAULT_FUEL

    ap = _Parser(prog="mbt", description="Model-based test generation, execution and coverage.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fuel(p):
        p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="evaluation fuel per expression")

    p = sub.add_parser("validate", help="check a model and list diagnostics")
    p.add_argument("model")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("sim", help="run a model on an input script")
    p.add_argument("model")
    p.add_argument("--inputs", required=True, help="JSON list of valuations or one tick per line")
    fuel(p)
    p.set_defaults(fn=cmd_sim)

    p = sub.add_parser("gen", help="generate a test suite")
    p.add_argument("model")
    p.add_argument("--kind", choices=["B", "C", "D"], required=True)
    p.add_argument("--spec", action="append", default=[], help="spec file (repeatable)")
    p.add_argument("--n", type=int, default=30, help="number of cases for kinds C and D")
    p.add_argument("--len-min", type=int, default=8)
    p.add_argument("--len-max", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seed-count", type=int, default=15)
    p.add_argument("--per-seed-pick", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--node-budget", type=int, default=600)
    p.add_argument("--max-wall-time", type=float, default=None)
    p.add_argument("--keep-going", action="store_true")
    p.add_argument("--no-postamble", action="store_true")
    p.add_argument("--out")
    fuel(p)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("run", help="execute a suite against a SUT")
    p.add_argument("suite")
    p.add_argument("--sut", required=True, help="concrete model file or exec:<command>")
    p.add_argument("--adapter", required=True)
    p.add_argument("--model", help="abstract model (default: the shipped demo model)")
    p.add_argument("--concrete", help="concrete model declaring the types of an exec: SUT "
                   "(default: the shipped demo SUT)")
    p.add_argument("--verdicts")
    fuel(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("cover", help="model C/D coverage of a suite")
    p.add_argument("model")
    p.add_argument("--suite", required=True)
    p.add_argument("--json", help="write a .cov.json map")
    p.add_argument("--csv", help="write one CSV row per item")
    fuel(p)
    p.set_defaults(fn=cmd_cover)

    p = sub.add_parser("mutate", help="print a seeded single-edit mutant")
    p.add_argument("model")
    p.add_argument("--op", required=True,
                   choices=["GuardNegate", "ConstantReplace", "TransitionRetarget", "OutputSwap",
                            "AssignmentDrop"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_mutate)

    p = sub.add_parser("lab", help="run a suite-comparison experiment")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: the config's 'out')")
    p.add_argument("--full-sizes", action="store_true", help="use the larger suite sizes")
    p.set_defaults(fn=cmd_lab)

    p = sub.add_parser("report", help="summarise a lab output directory")
    p.add_argument("dir")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except MbtError as exc:
        print(f"mbt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"mbt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())


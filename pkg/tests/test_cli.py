"""The ``mbt`` command line: subcommands and exit codes."""

import json
import subprocess
import sys

import pytest

from mbtlab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from mbtlab.dsl.suites import read_suite
from mbtlab.resources import data_path

MODEL = data_path("netmaster.afm")
SUT = data_path("netmaster_sut.afm")
ADAPTER = data_path("adapter.json")
TS4 = data_path("specs", "ts4.spec.json")


def test_validate_ok(capsys):
    assert main(["validate", MODEL]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith(": ok")


def test_validate_reports_diagnostics(tmp_path, capsys):
    bad = tmp_path / "bad.afm"
    bad.write_text("component C { ports { in i : Nope } efsm { states S; init S } }")
    assert main(["validate", str(bad)]) == EXIT_USAGE
    assert capsys.readouterr().out.strip()


def test_parse_error_is_a_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.afm"
    bad.write_text("component C {")
    assert main(["validate", str(bad)]) == EXIT_USAGE
    assert "bad.afm:1" in capsys.readouterr().err


def test_missing_file_is_a_usage_error(capsys):
    assert main(["validate", "/nonexistent/model.afm"]) == EXIT_USAGE


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["gen", MODEL])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE


def test_sim_line_script(tmp_path, capsys):
    script = tmp_path / "in.txt"
    script.write_text("PowerOn\n# comment\nNodeAnswer(N1, FCons(Amp, FNil))\nε\n")
    assert main(["sim", MODEL, "--inputs", str(script)]) == EXIT_OK
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [x["tick"] for x in lines] == [0, 1, 2]
    assert lines[0]["outputs"]["toNodes"].startswith("ConfigRequest(")
    assert "reg=SystemConfigCheck" in lines[0]["control"]


def test_sim_json_script(tmp_path, capsys):
    script = tmp_path / "in.json"
    script.write_text(json.dumps([{"inp": "PowerOn"}, {"inp": "PowerOff"}]))
    assert main(["sim", MODEL, "--inputs", str(script)]) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 2


def test_sim_bad_tick_names_the_tick(tmp_path, capsys):
    script = tmp_path / "in.json"
    script.write_text(json.dumps([{"inp": "PowerOn"}, {"nope": "PowerOn"}]))
    assert main(["sim", MODEL, "--inputs", str(script)]) == EXIT_USAGE
    assert "tick 1" in capsys.readouterr().err


def _gen(tmp_path, name, *extra):
    out = tmp_path / name
    assert main(["gen", MODEL, "--out", str(out), *extra]) == EXIT_OK
    return out


def test_gen_c(tmp_path):
    suite = read_suite(str(_gen(tmp_path, "c.json", "--kind", "C", "--n", "5", "--seed", "3")))
    assert len(suite.cases) == 5 and suite.generator["kind"] == "C"


def test_gen_b_needs_a_spec():
    with pytest.raises(SystemExit) as exc:
        main(["gen", MODEL, "--kind", "B"])
    assert exc.value.code == EXIT_USAGE


def test_gen_is_byte_identical_on_rerun(tmp_path):
    args = ["--kind", "B", "--spec", TS4, "--seed", "9", "--seed-count", "2"]
    a = _gen(tmp_path, "a.json", *args)
    b = _gen(tmp_path, "b.json", *args)
    assert a.read_bytes() == b.read_bytes()


def test_run_passes_and_fails(tmp_path, capsys):
    suite = _gen(tmp_path, "d.json", "--kind", "D", "--n", "8", "--seed", "2")
    assert main(["run", str(suite), "--sut", SUT, "--adapter", ADAPTER]) == EXIT_OK
    assert "8/8 passed" in capsys.readouterr().out

    b = _gen(tmp_path, "b.json", "--kind", "B", "--spec", TS4, "--seed-count", "1",
             "--per-seed-pick", "1")
    mutant = tmp_path / "mutant.afm"
    assert main(["mutate", SUT, "--op", "GuardNegate", "--seed", "3", "--out", str(mutant)]) == 0
    assert "RegistryMgr.t16.guard" in capsys.readouterr().err
    verdicts = tmp_path / "v.json"
    code = main(["run", str(b), "--sut", str(mutant), "--adapter", ADAPTER,
                 "--verdicts", str(verdicts)])
    assert code == EXIT_FAIL
    assert "class " in capsys.readouterr().out
    assert any(not v["pass"] for v in json.loads(verdicts.read_text()))


def test_run_against_external_process(tmp_path, capsys):
    suite = _gen(tmp_path, "d.json", "--kind", "D", "--n", "3", "--seed", "4")
    cmd = f"exec:{sys.executable} -m mbtlab.harness.serve {SUT}"
    assert main(["run", str(suite), "--sut", cmd, "--adapter", ADAPTER]) == EXIT_OK
    assert "3/3 passed" in capsys.readouterr().out


def test_cover(tmp_path, capsys):
    suite = _gen(tmp_path, "c.json", "--kind", "C", "--n", "4")
    js, cs = tmp_path / "cov.json", tmp_path / "cov.csv"
    assert main(["cover", MODEL, "--suite", str(suite), "--json", str(js), "--csv", str(cs)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("C/D coverage ") and "30 decisions, 40 atoms" in out
    assert len(json.loads(js.read_text())["items"]) == 70
    assert len(cs.read_text().splitlines()) == 71


def test_report_of_empty_dir(tmp_path, capsys):
    from mbtlab.lab.experiment import ExperimentReport, emit_report

    emit_report(ExperimentReport(), str(tmp_path))
    assert main(["report", str(tmp_path)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("suite")


def test_lab_with_bad_config_is_a_usage_error(tmp_path):
    cfg = tmp_path / "lab.json"
    cfg.write_text('{"model": "x"}')
    assert main(["lab", str(cfg)]) == EXIT_USAGE


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "mbtlab.cli", "validate", MODEL],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip().endswith("ok")

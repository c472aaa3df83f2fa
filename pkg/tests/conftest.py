from types import SimpleNamespace

import pytest
from hypothesis import HealthCheck, settings

from mbtlab.harness.adapter import read_adapter
from mbtlab.model.engine import Runtime
from mbtlab.resources import data_path, load_demo_model, load_demo_sut

settings.register_profile(
    "mbt", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("mbt")


TOY = """
type Msg = SwitchOn | SwitchOff | Ack
component Lamp {
  ports { in i : Msg; out o : Msg }
  efsm {
    states Off, On;
    init Off;
    trans Off -> On
      when i ? SwitchOn
      then o ! Ack;
    trans On -> Off
      when i ? SwitchOff;
  }
}
"""


@pytest.fixture(scope="session")
def demo_model():
    return load_demo_model()


@pytest.fixture(scope="session")
def demo_sut():
    return load_demo_sut()


@pytest.fixture(scope="session")
def demo_rt(demo_model):
    return Runtime(demo_model)


@pytest.fixture(scope="session")
def demo_irt(demo_model):
    return Runtime(demo_model, instrument=True)


@pytest.fixture(scope="session")
def demo_adapter(demo_model, demo_sut):
    return read_adapter(data_path("adapter.json"), demo_model, demo_sut)


@pytest.fixture(scope="session")
def toy_text():
    return TOY


# happy path of the demo: power on, all three nodes answer
HAPPY = [
    "PowerOn",
    "NodeAnswer(N1, FCons(Amp, FNil))",
    "NodeAnswer(N2, FCons(CdPlayer, FNil))",
    "NodeAnswer(N3, FCons(Nav, FNil))",
]


@pytest.fixture(scope="session")
def lab(tmp_path_factory):
    """The shipped lab configuration, run once per session (about three minutes)."""
    from mbtlab.lab.experiment import LabConfig, emit_report, run_lab

    cfg = LabConfig.read(data_path("lab.json"))
    art = {}
    report = run_lab(cfg, art)
    out = tmp_path_factory.mktemp("lab-out")
    emit_report(report, str(out))
    return SimpleNamespace(cfg=cfg, report=report, out=out, pools=art["pools"],
                           suites=art["suites"])


# acceptance criteria record their outcome here; the summary prints one line each
ACCEPTANCE = {}
CRITERIA = {
    1: "generated suites pass on the unmutated SUT",
    2: "coverage equals the event-log oracle",
    3: "pruned and exhaustive exploration reach the same control states",
    4: "B coverage above C at n=50 with separated CIs",
    5: "kills B >= C >= D and D within B*",
    6: "gen and lab reruns are byte-identical",
    7: "parse/print round trip",
    8: "statistics fixtures",
    9: "postambles match the registry on replay",
}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        title = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})")

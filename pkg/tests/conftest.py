from pathlib import Path

import hypothesis
import numpy as np
import pytest

from timocert import (EXAMPLE_IC, EXAMPLE_WEIGHTS, build_system, certify, example_beam, integrate,
                      sample_initial_condition)

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]
EXAMPLE_CONFIG = ROOT / "configs" / "example.json"

_acceptance: dict[str, tuple[str, str]] = {}
_details: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _acceptance.get(label, ("PASS", ""))[0]
        status = "PASS" if rep.passed and prev == "PASS" else "FAIL"
        _acceptance[label] = (status, item.name)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance):
        status, _ = _acceptance[label]
        terminalreporter.write_line(f"[{status}] {label}")
        for line in _details.get(label, []):
            terminalreporter.write_line(f"         {line}")


@pytest.fixture
def detail(request):
    """Record a line shown under the test's acceptance criterion in the summary."""
    label = request.node.get_closest_marker("criterion").args[0]
    lines = _details.setdefault(label, [])

    def add(text: str) -> None:
        lines.append(text)
        print(f"{label}: {text}")

    return add


@pytest.fixture(scope="session")
def beam():
    return example_beam()


@pytest.fixture(scope="session")
def example_cert(beam):
    return certify(EXAMPLE_WEIGHTS, beam)


@pytest.fixture(scope="session")
def example_system(beam):
    return build_system(beam, 50)


@pytest.fixture(scope="session")
def example_run(example_system, example_cert):
    """The full Example simulation: N = 50, dt = 1e-3, t_end = 50."""
    z0 = sample_initial_condition(EXAMPLE_IC, example_system)
    return integrate(example_system, z0, 1e-3, 50.0, EXAMPLE_WEIGHTS, example_cert)


@pytest.fixture
def rng():
    return np.random.default_rng(20220224)

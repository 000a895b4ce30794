import pathlib
import sys

import pytest

from typedcls.rewrite import parse_rules
from typedcls.typesys import parse_env

sys.path.insert(0, str(pathlib.Path(__file__).parent))

MODELS = pathlib.Path(__file__).resolve().parent.parent / "demos" / "models"

_criteria = {}
_notes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args
        _criteria[number] = (title, report.passed, _notes.get(item.nodeid, ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, note = _criteria[number]
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{note}]" if note else ""))


@pytest.fixture(scope="session")
def models():
    return MODELS


@pytest.fixture(scope="session")
def env_ex():
    return parse_env((MODELS / "repellency.env").read_text())


@pytest.fixture(scope="session")
def env_abs():
    return parse_env((MODELS / "absorption.env").read_text())


@pytest.fixture(scope="session")
def repellency_rules():
    return {r.name: r for r in parse_rules((MODELS / "repellency.rules").read_text())}


@pytest.fixture(scope="session")
def absorption_rules():
    return {r.name: r for r in parse_rules((MODELS / "absorption.rules").read_text())}


@pytest.fixture
def note(request):
    """Attach a one-line summary to the acceptance report of the calling test."""
    def record(text):
        _notes[request.node.nodeid] = text
    return record

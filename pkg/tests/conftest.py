import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cpfcert.cpf_io import parse_certificate  # noqa: E402

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


def load(name):
    return parse_certificate((CORPUS / name).read_bytes())


@pytest.fixture(scope="session")
def group_cp():
    return load("group.proof.xml")


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")

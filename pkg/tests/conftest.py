from __future__ import annotations

from pathlib import Path

import pytest

from dimerlab.monomial import load_aliases, parse_monomial
from dimerlab.quiver import load_quiver

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
ALIASES = load_aliases(FIXTURES / "xyzw.alias")

# filled in by tests/test_acceptance.py, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def mono(text: str):
    return parse_monomial(text, ALIASES)


def monos(*texts):
    return {mono(t) for t in texts}


def fixture_quiver(name: str):
    return load_quiver(FIXTURES / f"{name}.quiver")


@pytest.fixture(scope="session")
def conifold():
    return fixture_quiver("conifold")


@pytest.fixture(scope="session")
def example1():
    return fixture_quiver("example1")


@pytest.fixture(scope="session")
def example2():
    return fixture_quiver("example2")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])

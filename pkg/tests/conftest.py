import json
import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def sys_a():
    return oracles.sys_a()


@pytest.fixture
def sys_b():
    return oracles.sys_b()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def write_doc(tmp_path):
    def _write(doc, name="system.json"):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)

    return _write


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

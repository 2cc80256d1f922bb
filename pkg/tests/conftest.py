import json
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def oracle():
    """High-precision values frozen by scripts/freeze_oracles.py."""
    return json.loads((Path(__file__).parent / "oracle_values.json").read_text())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])

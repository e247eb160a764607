import glob
import os

import pytest

from pdsync.formats import load_instance
from pdsync.pda import complete

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
CORPUS = sorted(glob.glob(os.path.join(FIXTURES, "corpus", "*.pda")))


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture(scope="session")
def run4_doc():
    return load_instance(fixture_path("run4.pda"))


@pytest.fixture(scope="session")
def run4(run4_doc):
    return complete(run4_doc.model)


@pytest.fixture(scope="session")
def q4():
    return frozenset("1234")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    results = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::")[1].split("[")[0]
            ok = outcome == "passed" and results.get(name, True)
            results[name] = ok
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(results, key=lambda n: int(n.split("_")[2])):
        label = " ".join(name.split("_")[3:])
        status = "PASS" if results[name] else "FAIL"
        terminalreporter.write_line(f"criterion {name.split('_')[2]} ({label}): {status}")

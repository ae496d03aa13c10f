from pathlib import Path

import pytest

from stategraph.pipeline import analyse
from stategraph.textio import parse_file

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def running():
    return parse_file(CORPUS / "running.pbes")


@pytest.fixture(scope="session")
def running_global(running):
    return analyse(running, "global")


@pytest.fixture(scope="session")
def running_local(running):
    return analyse(running, "local")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])

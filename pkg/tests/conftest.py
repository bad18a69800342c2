import pytest

from dotcavity.qspace import SpaceLayout

_acceptance: dict[str, str] = {}


@pytest.fixture
def lay2():
    """Two logic dots ``j``, ``k`` and a cavity truncated at 3 photons."""
    return SpaceLayout.dots_and_cavity(("j", "k"), fock_cutoff=3)


@pytest.fixture
def lay1q():
    return SpaceLayout.dots_and_cavity(("q",), fock_cutoff=3)


def pytest_runtest_logreport(report):
    if report.when == "call" and "acceptance" in report.keywords:
        _acceptance[report.nodeid.split("::")[-1]] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.failed and "acceptance" in report.keywords:
        _acceptance[report.nodeid.split("::")[-1]] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")

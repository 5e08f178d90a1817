import pytest

from claimkeys.sample import synthetic_corpus


@pytest.fixture(scope="session")
def sample50():
    return synthetic_corpus(50, seed=0)


@pytest.fixture(scope="session")
def sample200():
    return synthetic_corpus(200, seed=1)


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    number = int(name.split("_")[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _ACCEPTANCE[number] = ("PASS" if report.passed else "FAIL", name, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, name, detail = _ACCEPTANCE[number]
        line = f"criterion {number:2d}: {status}  {name}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))

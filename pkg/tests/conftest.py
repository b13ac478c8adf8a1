import os
import re
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    match = re.match(r"test_ac(\d+)_", item.name)
    if match is None or item.module.__name__.split(".")[-1] != "test_acceptance":
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        status = "PASS" if report.passed else "FAIL"
        _CRITERIA[int(match.group(1))] = f"AC{match.group(1)} {status}  {label}"


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[key])

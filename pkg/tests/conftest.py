from __future__ import annotations

import pytest

from rosa.billiard import find_planar_candidate
from rosa.edgeword import parse_edgeword, subrosa_edgeword
from rosa.substitution import build_substitution


@pytest.fixture(scope="session")
def subrosa5():
    return build_substitution(parse_edgeword("131131", 5))


@pytest.fixture(scope="session")
def subrosa7():
    return build_substitution(subrosa_edgeword(7))


@pytest.fixture(scope="session")
def planar7_candidate():
    return find_planar_candidate(7)


@pytest.fixture(scope="session")
def planar7(planar7_candidate):
    return build_substitution(planar7_candidate.edgeword)


# one summary line per acceptance criterion, taken from the test outcomes
_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "ran": False, "failed": []})
    if rep.when == "call" or rep.failed:
        entry["ran"] = True
        if rep.failed:
            entry["passed"] = False
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["passed"] and e["ran"] else "FAIL"
        extra = f"  (failed: {', '.join(e['failed'])})" if e["failed"] else ""
        terminalreporter.write_line(f"criterion {number:2d} {status}  {e['title']}{extra}")

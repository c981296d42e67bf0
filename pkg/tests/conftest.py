"""Per-criterion summary for the acceptance run.

Tests tagged ``@pytest.mark.criterion(k)`` are grouped by k; a criterion
passes when every tagged test passed.  Tests may attach a short measurement
through the ``report`` fixture, which is echoed on the summary line.
"""

import pytest

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.fixture
def report(request):
    def add(text: str):
        request.node.user_properties.append(("report", text))
    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        k = mark.args[0]
        entry = _RESULTS.setdefault(k, {"ok": True, "notes": [], "ran": 0})
        entry["ran"] += 1
        entry["ok"] = entry["ok"] and rep.passed
        entry["notes"] += [v for key, v in item.user_properties if key == "report"]
        if not rep.passed:
            entry["notes"].append(f"FAILED {item.name}")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        e = _RESULTS[k]
        status = "PASS" if e["ok"] else "FAIL"
        notes = "; ".join(e["notes"])
        terminalreporter.write_line(f"criterion {k:2d}: {status}  ({e['ran']} tests) {notes}")

from __future__ import annotations

from collections import OrderedDict

_RESULTS: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test checks")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            entry = _RESULTS.setdefault(number, {"title": title, "failed": [], "passed": 0})
            item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    entry = _RESULTS[props["criterion"]]
    if report.when == "call" and report.passed:
        entry["passed"] += 1
    elif report.failed or report.skipped:
        case = report.nodeid.split("::")[-1]
        if case not in entry["failed"]:
            entry["failed"].append(case)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, entry in sorted(_RESULTS.items()):
        ran = entry["passed"] + len(entry["failed"])
        if ran == 0:
            continue
        status = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {number}: {status}  {entry['title']}"
        if entry["failed"]:
            line += f"  (failing: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)

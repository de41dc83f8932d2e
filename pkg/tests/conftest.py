"""Collects ``@pytest.mark.acceptance(n, label)`` outcomes into one line per criterion."""
import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, label): acceptance criterion check")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("acceptance")
    if mark is None or call.when not in ("setup", "call"):
        return
    number, label = mark.args
    entry = _RESULTS.setdefault(number, {"label": label, "ok": True, "failed": []})
    if call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["ok"] = False
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"ACCEPT {number} {entry['label']}: {status}"
        if entry["failed"]:
            line += f"  ({', '.join(entry['failed'])})"
        terminalreporter.write_line(line)

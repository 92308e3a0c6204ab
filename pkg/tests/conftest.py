"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""
from __future__ import annotations

import pytest

_OUTCOMES: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    number, title = mark.args[0], mark.args[1]
    entry = _OUTCOMES.setdefault(number, {"title": title, "ok": True, "detail": ""})
    if rep.when == "setup" and not rep.passed:
        entry["ok"] = False
    if rep.when == "call":
        entry["ok"] = entry["ok"] and rep.passed
        entry["detail"] = "; ".join(v for k, v in item.user_properties if k == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        e = _OUTCOMES[number]
        line = f"{'PASS' if e['ok'] else 'FAIL'} criterion {number}: {e['title']}"
        if e["detail"]:
            line += f" -- {e['detail']}"
        terminalreporter.write_line(line)

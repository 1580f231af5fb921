from __future__ import annotations

import re

import pytest

_ACCEPTANCE: dict[int, dict] = {}
_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


@pytest.fixture
def measured(request):
    """Record measured values for the acceptance summary: ``measured(ratio=3.0)``."""
    m = _CRITERION.search(request.node.nodeid)
    store = _ACCEPTANCE.setdefault(int(m.group(1)), {}) if m else {}

    def record(**values):
        store.setdefault("values", {}).update(values)

    return record


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    entry = _ACCEPTANCE.setdefault(int(m.group(1)), {})
    entry["name"] = m.group(2).replace("_", " ")
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["passed"] = report.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not any("passed" in e for e in _ACCEPTANCE.values()):
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[num]
        if "passed" not in entry:
            continue
        status = "PASS" if entry["passed"] else "FAIL"
        values = entry.get("values", {})
        detail = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in values.items())
        tr.write_line(f"criterion {num:2d}: {status}  {entry['name']}" + (f"  [{detail}]" if detail else ""))

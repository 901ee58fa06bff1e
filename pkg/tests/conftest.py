"""Shared pytest plumbing.

The acceptance tests record one (number, label, ok, detail) tuple each;
after the run, a summary section prints one PASS/FAIL line per
criterion so the gate's verdicts are visible even when pytest captures
test stdout.
"""

import pytest

_ACCEPTANCE_RESULTS = []


@pytest.fixture
def acceptance_record():
    def record(number, label, ok, detail):
        _ACCEPTANCE_RESULTS.append((number, label, bool(ok), detail))
        print(f"criterion {number} ({label}): {'PASS' if ok else 'FAIL'} -- {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, ok, detail in sorted(_ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({label}): {status} -- {detail}")

import re

import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per acceptance criterion at the end of the run."""
    try:
        from test_acceptance import EXTRA_NOTES
    except ImportError:
        EXTRA_NOTES = {}
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "error":
                continue
            m = re.search(r"test_acceptance\.py::test_(\d+)_(\w+)", rep.nodeid)
            if not m:
                continue
            num, name = int(m.group(1)), m.group(2)
            status = "PASS" if outcome == "passed" else "FAIL"
            note = EXTRA_NOTES.get(num)
            suffix = f"  [{note}]" if note else ""
            lines[num] = (
                f"criterion {num:02d} {name.replace('_', '-')}: {status}{suffix}"
            )
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])

"""Emit the acceptance pass/fail lines in the terminal summary."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

"""Shared pytest plumbing for the suite.

The acceptance module records one PASS/FAIL line per criterion here; the
lines are echoed in the terminal summary so they are visible even when the
individual tests pass and their stdout is captured.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)

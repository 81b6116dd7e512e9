"""Shared pytest hooks.

test_acceptance.py registers one line per acceptance criterion in
ACCEPTANCE_LINES; the hook below replays them as a dedicated section at
the end of the run so the checklist survives output capturing.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

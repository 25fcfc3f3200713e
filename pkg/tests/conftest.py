"""Shared pytest wiring: the acceptance summary section.

test_acceptance.py records one (passed, detail) entry per numbered
criterion into its module level RESULTS dict; the hook below prints
them as a compact block at the end of the run so the pass/fail state
of each criterion is visible in one place even when a test fails.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = None
    for name, m in list(sys.modules.items()):
        if name.rsplit(".", 1)[-1] == "test_acceptance" and hasattr(m, "RESULTS"):
            mod = m
            break
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for num in range(1, 10):
        if num in mod.RESULTS:
            ok, detail = mod.RESULTS[num]
            line = f"criterion {num}: {'PASS' if ok else 'FAIL'}"
            if detail:
                line += f"  ({detail})"
        else:
            line = f"criterion {num}: NOT RUN"
        terminalreporter.write_line(line)

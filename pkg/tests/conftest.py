"""Shared pytest hooks: collect acceptance verdict lines into the summary.

The acceptance tests each emit one [PASS]/[FAIL] line; stdout capture would
hide those on success, so they are replayed in a terminal section at the
end of the run.
"""

VERDICT_LINES = []


def record_verdict(ok: bool, label: str, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    VERDICT_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if VERDICT_LINES:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICT_LINES:
            terminalreporter.write_line(line)

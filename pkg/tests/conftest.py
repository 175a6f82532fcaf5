"""Collects one-line verdicts from the acceptance tests and prints them
after the run, outside pytest's output capture."""

VERDICTS = []


def record_verdict(line: str) -> None:
    VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if VERDICTS:
        terminalreporter.section("engine guarantees")
        for line in VERDICTS:
            terminalreporter.line(line)

import re

import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion; echoed in the terminal summary."""

    def record(label: str, ok: bool, detail: str, seconds: float) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail} ({seconds:.1f}s)"
        request.config.stash[_LINES].append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(re.search(r"\bC(\d+)", s).group(1))):
            terminalreporter.write_line(line)

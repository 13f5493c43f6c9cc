import numpy as np
import pytest

_acceptance_lines: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def report():
    """Record a one-line acceptance verdict, echoed in the terminal summary."""

    def add(criterion: str, ok: bool, detail: str) -> bool:
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from nonlocal_torus.torus_field import TorusGrid


@pytest.fixture
def grid1():
    return TorusGrid(1, 32)


@pytest.fixture
def grid2():
    return TorusGrid(2, 16)


def wrapped_distance(x, y):
    d = np.abs(x - y)
    d = np.minimum(d, 1.0 - d)
    return np.sqrt(np.sum(d * d, axis=-1))


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

import numpy as np
import pytest

from logpr import build_graph, chain


def cycle(n):
    return build_graph([(i, (i + 1) % n) for i in range(n)], n=n)


def complete(n):
    return build_graph([(i, j) for i in range(n) for j in range(i + 1, n)], n=n)


def circulant(n, offsets):
    return build_graph([(i, (i + o) % n) for i in range(n) for o in offsets], n=n)


@pytest.fixture
def path10():
    return chain(10)


@pytest.fixture
def triangle():
    return complete(3)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


# acceptance lines collected by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

import pytest

from pathquery.graph import DirectedGraph

A1_TREE = {(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)}
A1_EXTRA = (3, 5)


@pytest.fixture
def t1() -> DirectedGraph:
    """7-vertex rooted tree."""
    return DirectedGraph(7, frozenset(A1_TREE), 0)


@pytest.fixture
def a1() -> DirectedGraph:
    """``t1`` plus the extra edge 3 -> 5 (vertex 5 gets parents 2 and 3)."""
    return DirectedGraph(7, frozenset(A1_TREE | {A1_EXTRA}), 0)


@pytest.fixture
def g2() -> DirectedGraph:
    """0 <-> 1 -> 2."""
    return DirectedGraph(3, frozenset({(0, 1), (1, 0), (1, 2)}))


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion and return ``ok``."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        print(line)
        request.config.stash[ACCEPTANCE].append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

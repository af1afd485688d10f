import itertools
from fractions import Fraction

import pytest

from bpwmc.graph import Graph


def brute_independent_sets(g: Graph) -> list[frozenset]:
    """Independent sets by checking every subset against the edge list."""
    edges = g.edges()
    out = []
    for r in range(g.n + 1):
        for s in itertools.combinations(range(g.n), r):
            ss = set(s)
            if not any(u in ss and v in ss for u, v in edges):
                out.append(frozenset(s))
    return out


def brute_pathwidth(g: Graph) -> int:
    """Vertex separation number minimised over all layouts."""
    if g.n == 0:
        return 0
    best = g.n
    for order in itertools.permutations(range(g.n)):
        width = 0
        for i in range(1, g.n + 1):
            placed = set(order[:i])
            boundary = sum(1 for v in placed if any(u not in placed for u in g.neighbors(v)))
            width = max(width, boundary)
            if width >= best:
                break
        best = min(best, width)
    return best


@pytest.fixture
def half():
    return Fraction(1, 2)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])

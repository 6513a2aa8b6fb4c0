import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from markedquiver import (GF, HalflinearSpec, MarkedQuiver, Poset, Quiver, make_halflinear,  # noqa: E402
                          make_linear, make_nilpotent)


@pytest.fixture
def F2():
    return GF(2)


@pytest.fixture
def F3():
    return GF(3)


def ex6_poset():
    return Poset.from_relations(["a", "b", "a*", "c", "d"],
                                [("a", "b"), ("b", "a*"), ("a*", "c"), ("a*", "d")])


def ex6_vectroid(F):
    return make_halflinear(HalflinearSpec(ex6_poset(), (("a", "a*"),)), F)


def marked(vertices, arrows, marking, F):
    """``arrows`` as ``(id, source, target)``; ``marking`` maps vertex -> factory ``F -> Vectroid``."""
    return MarkedQuiver(Quiver(vertices, arrows), {v: marking[v](F) for v in vertices}, F)


K = lambda F: make_linear(1, F)  # noqa: E731
K2 = lambda F: make_linear(2, F)  # noqa: E731
K3 = lambda F: make_linear(3, F)  # noqa: E731
N2 = lambda F: make_nilpotent(2, F)  # noqa: E731
EX6 = ex6_vectroid


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

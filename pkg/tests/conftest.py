import pytest

from hierarchy_lab.algebra import parse_polynomial
from hierarchy_lab.relaxations import PolyProblem

NAMES = ("x1", "x2")


def poly(text, names=NAMES):
    return parse_polynomial(text, names)


@pytest.fixture(scope="session")
def f():
    return poly("(-2 + x1 + x2)^2")


@pytest.fixture(scope="session")
def g():
    return poly("1 - x1^2 - x2^2")


@pytest.fixture(scope="session")
def problem(f, g):
    return PolyProblem(f, (g,), NAMES)

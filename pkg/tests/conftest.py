import pytest

from popmatch.model import parse_instance, parse_matching

FIG1_TEXT = """\
marriage
A a1 a2 a3
B b1 b2 b3
a1: b1 b2 b3
a2: b1 b2
a3: b1
b1: a1 a2 a3
b2: a1 a2
b3: a1
"""


@pytest.fixture
def fig1():
    return parse_instance(FIG1_TEXT)


@pytest.fixture
def m1(fig1):
    """The stable matching of the six-vertex reference instance."""
    return parse_matching("a1 b1\na2 b2\n", fig1)


@pytest.fixture
def m2(fig1):
    """The dominant matching; (a1, b1) blocks it."""
    return parse_matching("a1 b2\na2 b1\n", fig1)


@pytest.fixture
def m3(fig1):
    """The unique perfect matching; ties m1, loses to m2 by two votes."""
    return parse_matching("a1 b3\na2 b2\na3 b1\n", fig1)

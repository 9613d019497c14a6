import pytest

from cexforge.model import Comparison, Dtmc, ReachabilityProperty


def make_d1():
    """Loop-exit model: Pr(0 |= eventually goal) = 1/3."""
    return Dtmc(
        4,
        [
            [(1, 0.5), (2, 0.5)],
            [(0, 0.5), (3, 0.5)],
            [(2, 1.0)],
            [(3, 1.0)],
        ],
        initial=0,
        labels={"goal": {3}},
    )


def make_d2():
    """Branch model: Pr(eventually a) = 0.3, Pr(eventually b) = 0.7."""
    return Dtmc(
        5,
        [
            [(1, 0.6), (2, 0.4)],
            [(3, 0.5), (4, 0.5)],
            [(4, 1.0)],
            [(3, 1.0)],
            [(4, 1.0)],
        ],
        initial=0,
        labels={"a": {3}, "b": {4}},
    )


@pytest.fixture
def d1():
    return make_d1()


@pytest.fixture
def d2():
    return make_d2()


def prop_le(threshold, label):
    return ReachabilityProperty(Comparison.LESS_EQ, threshold, label)


def prop_lt(threshold, label):
    return ReachabilityProperty(Comparison.LESS, threshold, label)

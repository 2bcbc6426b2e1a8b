import math

import pytest

from hubbard_pair.core import LatticeParams

PI = math.pi


@pytest.fixture
def unit():
    """J = d = hbar = 1, U = 0."""
    return LatticeParams()


def params(U=0.0, J=1.0, d=1.0):
    return LatticeParams(J=J, U=U, d=d)


def second_difference(f, x, h):
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)

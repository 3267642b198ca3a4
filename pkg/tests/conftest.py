import numpy as np
import pytest

from ctstl import Signal, parse, validate
from ctstl.errors import ValidationError
from ctstl.randgen import random_formula, random_signal

NAMES = ("x", "y")


def make_case(rng, depth=3, length=30, max_window=4, names=NAMES):
    """One validated random formula plus a signal long enough for it."""
    while True:
        f = random_formula(rng, names, depth, max_window=max_window)
        try:
            f = validate(f, names)
        except ValidationError:
            continue
        return f, random_signal(rng, names, length)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def fig4_signal():
    vals = np.array([2, -1, 7, 10, -5, 15, 8, -2], dtype=float)
    return Signal(("x",), vals.reshape(-1, 1), 1.0)


@pytest.fixture
def fig4_formula():
    return validate(parse("G[0,2] C[1,5]^3 (x > 0)"), ("x",))


@pytest.fixture
def example_pair():
    """The worked C[2,8]^4 (x>1) pair: one satisfying, one violating."""
    x1 = np.array([0, 0, 2, 3, 4, 7, 10, 0, 5, 5, 15], dtype=float)
    x2 = np.array([0, 0, 2, -3, -4, 7, -5, -1, 0, 5, 15], dtype=float)
    f = validate(parse("C[2,8]^4 (x > 1)"), ("x",))
    return (f,
            Signal(("x",), x1.reshape(-1, 1), 1.0),
            Signal(("x",), x2.reshape(-1, 1), 1.0))

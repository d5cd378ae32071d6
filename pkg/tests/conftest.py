import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

SQRT3 = math.sqrt(3.0)


def sym222(t111, t112, t122, t222):
    """Symmetric 2x2x2 array from its four distinct entries."""
    vals = (t111, t112, t122, t222)
    dtype = object if isinstance(t111, Fraction) else float
    A = np.empty((2, 2, 2), dtype=dtype)
    for idx in np.ndindex(2, 2, 2):
        A[idx] = vals[sum(idx)]
    return A


@pytest.fixture
def S():
    """x^3 + y^3 as a dense 2x2x2 array."""
    return sym222(1.0, 0.0, 0.0, 1.0)


@pytest.fixture
def S_exact():
    return sym222(Fraction(1), Fraction(0), Fraction(0), Fraction(1))


@pytest.fixture
def T_prime():
    """Symmetric tensor with two eigenvector classes at its spectral norm 1."""
    return sym222(1.0, 0.0, 2 * SQRT3 - 3, 6 * SQRT3 - 10)


def random_rational_sym(rng, lo=-9, hi=9):
    return sym222(*(Fraction(int(rng.integers(lo, hi + 1)), int(rng.integers(1, 6)))
                    for _ in range(4)))


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

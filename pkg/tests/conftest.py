import random

import pytest
from hypothesis import strategies as st

from kisin.gf import field
from kisin.lattice import Mat2, VertexClass, neighbors
from kisin.series import LaurentElement

FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2), (2, 4)]


@pytest.fixture
def F2():
    return field(2)


@pytest.fixture
def F3():
    return field(3)


@pytest.fixture
def F4():
    return field(2, 2)


def L(F, terms, horizon=None):
    """Laurent element from an {exponent: int} dict."""
    return LaurentElement.from_terms(F, {e: F.from_int(c) if F.m == 1 else c for e, c in terms.items()}, horizon)


def diag(F, e1, e2):
    return Mat2.diag(F, e1, e2)


def walk(F, seed, steps):
    rng = random.Random(seed)
    v = VertexClass.base(F)
    for _ in range(steps):
        v = rng.choice(neighbors(v))
    return v


fields = st.sampled_from(FIELDS).map(lambda pm: field(*pm))
small_fields = st.sampled_from([(2, 1), (3, 1), (2, 2)]).map(lambda pm: field(*pm))


@st.composite
def laurents(draw, F=None, lo=-3, hi=3, width=6):
    F = F if F is not None else draw(fields)
    val = draw(st.integers(lo, hi))
    coeffs = draw(st.lists(st.integers(0, F.q - 1), min_size=0, max_size=width))
    return LaurentElement(F, val, coeffs)


@st.composite
def vertices(draw, F=None, max_steps=6):
    F = F if F is not None else draw(small_fields)
    return walk(F, draw(st.integers(0, 10**6)), draw(st.integers(0, max_steps)))


# -- acceptance report ------------------------------------------------------------

ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])

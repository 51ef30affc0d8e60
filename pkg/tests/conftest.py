from pathlib import Path

import pytest
from hypothesis import strategies as st

from ncdomain.acceptance import flagship_f, flagship_g
from ncdomain.symbol import Symbol

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def f():
    return flagship_f()


@pytest.fixture
def g():
    return flagship_g()


@pytest.fixture
def data_dir():
    return DATA


def words(n, min_size=0, max_size=5):
    return st.lists(st.integers(1, n), min_size=min_size, max_size=max_size).map(tuple)


@st.composite
def symbols(draw, n=None, max_degree=3, max_extra=4):
    """Valid finite-support symbols with generator coefficients in [0.2, 3]."""
    if n is None:
        n = draw(st.integers(1, 3))
    coeffs = {(i,): draw(st.floats(0.2, 3.0)) for i in range(1, n + 1)}
    for w in draw(st.lists(words(n, 2, max_degree), max_size=max_extra)):
        coeffs[w] = draw(st.one_of(st.just(0.0), st.floats(1e-3, 2.0)))
    return Symbol(n, coeffs)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for result in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(result.line())

import os
import sys

import hypothesis
import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from lcsparse.core import Instance, Labeling, Multilabeling  # noqa: E402

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

IDENT, SWAP, CONST0, CONST1 = (0, 1), (1, 0), (0, 0), (1, 1)


def make_tiny1() -> Instance:
    return Instance(2, 2, 2, ((0, 0, IDENT), (0, 1, CONST0), (1, 0, SWAP), (1, 1, IDENT)))


def make_tiny2() -> Instance:
    return Instance(2, 2, 2, ((0, 0, CONST0), (1, 0, CONST1), (0, 1, IDENT), (1, 1, IDENT)))


@pytest.fixture
def tiny1():
    return make_tiny1()


@pytest.fixture
def tiny2():
    return make_tiny2()


@st.composite
def instances(draw, max_side=4, max_sigma=3, min_edges=0):
    n_a = draw(st.integers(1, max_side))
    n_b = draw(st.integers(1, max_side))
    sigma = draw(st.integers(1, max_sigma))
    pairs = [(a, b) for a in range(n_a) for b in range(n_b)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_edges, len(pairs))))
    symbol = st.integers(0, sigma - 1)
    edges = tuple(
        (a, b, tuple(draw(st.lists(symbol, min_size=sigma, max_size=sigma)))) for a, b in chosen
    )
    return Instance(n_a, n_b, sigma, edges)


@st.composite
def labelings(draw, inst):
    symbol = st.integers(0, inst.sigma - 1)
    return Labeling(
        draw(st.lists(symbol, min_size=inst.n_a, max_size=inst.n_a)),
        draw(st.lists(symbol, min_size=inst.n_b, max_size=inst.n_b)),
    )


@st.composite
def multilabelings(draw, inst):
    sets = st.frozensets(st.integers(0, inst.sigma - 1))
    return Multilabeling(
        tuple(draw(st.lists(sets, min_size=inst.n_a, max_size=inst.n_a))),
        tuple(draw(st.lists(sets, min_size=inst.n_b, max_size=inst.n_b))),
    )


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])

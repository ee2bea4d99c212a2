import numpy as np
import pytest
from hypothesis import strategies as st

from pixelcodes.matrix import PixelMatrix


@st.composite
def binary_matrices(draw, min_order=1, max_order=8, order=None):
    n = order if order is not None else draw(st.integers(min_order, max_order))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    return PixelMatrix(np.where(np.array(bits).reshape(n, n), 1, -1))


@st.composite
def trit_matrices(draw, min_order=1, max_order=6):
    n = draw(st.integers(min_order, max_order))
    vals = draw(st.lists(st.sampled_from((-1, 0, 1)), min_size=n * n, max_size=n * n))
    return PixelMatrix(np.array(vals).reshape(n, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance results, printed as a block at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

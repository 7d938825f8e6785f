import sys

import hypothesis
import numpy as np
import pytest

from qmagic import construct, linalg
from qmagic.squares import LatinSquare

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=15, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def tol():
    return linalg.Tolerances()


@pytest.fixture
def example_latin():
    return construct.example_latin_square()


@pytest.fixture
def example_qls(example_latin):
    return construct.easy_qls(example_latin, linalg.standard_basis(4))


@pytest.fixture
def nonclassical_qls():
    return construct.nonclassical_qls4()


@pytest.fixture
def bundle2():
    return construct.build_counterexample(2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cyclic3():
    return LatinSquare.cyclic(3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])

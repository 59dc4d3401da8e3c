import numpy as np
import pytest
from hypothesis import settings

from regretlearn.core import FiniteComplexObject, LossMatrix
from regretlearn.gaussian import GaussianExampleSpec, discretize

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_object(rng, signals=2, states=2, models=2):
    joint = rng.random((signals, states, models)) + 1e-3
    return FiniteComplexObject(joint / joint.sum(axis=(0, 1), keepdims=True))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def robbins():
    return discretize(GaussianExampleSpec.robbins(0.05))


@pytest.fixture(scope="session")
def robbins_coarse():
    return discretize(GaussianExampleSpec.robbins(thetas=[0.0, 0.25, 0.5, 0.75, 1.0]))


@pytest.fixture(scope="session")
def two_d():
    return discretize(GaussianExampleSpec.two_model_2d())


@pytest.fixture
def zero_one():
    return LossMatrix.zero_one(2)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: (k[0] != "A", k)):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])

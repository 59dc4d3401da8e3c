import numpy as np
import pytest

from regretlearn.core import ConfigurationError, FiniteComplexObject, LossMatrix, Strategy, optimal_strategy
from regretlearn.gaussian import GaussianExampleSpec, Grid1D, corner_strategy, discretize
from regretlearn.core import predominates
from regretlearn.learning import LearningSource
from regretlearn.oracles import (
    TinyInstance,
    brute_force_phi,
    domination_search,
    enumerate_deterministic_strategies,
    grid_dual_value,
    simplex_grid,
    sort_projection,
)

from conftest import random_object


def test_tiny_instance_size_gate(rng):
    with pytest.raises(ConfigurationError):
        TinyInstance(random_object(rng, 5, 2, 2), LossMatrix.zero_one(2))
    with pytest.raises(ConfigurationError):
        TinyInstance(random_object(rng, 2, 2, 2), LossMatrix.zero_one(2),
                     LearningSource(np.full((9, 2), 1 / 9)))


@pytest.mark.parametrize("v, expected", [
    ((0.25, 0.25, 0.5), (0.25, 0.25, 0.5)),
    ((0.8, 0.4), (0.7, 0.3)),
    ((2.0, 0.0), (1.0, 0.0)),
])
def test_sort_projection(v, expected):
    np.testing.assert_allclose(sort_projection(v).tau, expected, atol=1e-15)


@pytest.mark.parametrize("shape, count", [((1, 2), 2), ((2, 2), 4), ((3, 3), 27)])
def test_enumeration_counts(shape, count):
    strategies = enumerate_deterministic_strategies(shape)
    assert len(strategies) == count
    assert len(set(strategies)) == count


def test_enumeration_limit():
    with pytest.raises(ConfigurationError):
        enumerate_deterministic_strategies((21, 2))


def test_bayes_never_predominated(rng):
    from regretlearn.core import bayes_strategy
    for _ in range(2000):
        inst = TinyInstance.random(rng, int(rng.integers(1, 5)), int(rng.integers(2, 5)),
                                   int(rng.integers(1, 5)), zero_one=bool(rng.integers(2)))
        tau = rng.dirichlet(np.ones(inst.object.model_count))
        assert domination_search(inst, bayes_strategy(inst.object, inst.loss, tau)) is None


def test_single_model_finds_optimal(rng):
    inst = TinyInstance.random(rng, 3, 2, 1)
    opt = optimal_strategy(inst.object, inst.loss, 0)
    worse = Strategy.deterministic(1 - opt.decisions, 2)
    assert domination_search(inst, worse) == opt


def test_two_d_coarse_grid_has_predominator():
    problem = discretize(GaussianExampleSpec.two_model_2d(), Grid1D(-5.0, 6.0, 11 / 40))
    assert problem.object.signal_count == 1600
    loss = LossMatrix.zero_one(2)
    corner = corner_strategy(problem)
    found = domination_search((problem.object, loss), corner)
    assert found is not None and predominates(problem.object, loss, found, corner)


def test_simplex_grid():
    g = simplex_grid(3, 5)
    assert g.shape == (15, 3)
    np.testing.assert_allclose(g.sum(axis=1), 1.0)


def test_grid_dual_trivial_cases(rng):
    inst = TinyInstance.random(rng, 3, 2, 1)
    assert grid_dual_value(inst) == pytest.approx(0.0, abs=1e-15)
    joint = np.repeat(random_object(rng, 3, 2, 1).joint, 3, axis=2)
    same = TinyInstance(FiniteComplexObject(joint), LossMatrix.zero_one(2))
    assert grid_dual_value(same, 51) == pytest.approx(0.0, abs=1e-15)


def test_brute_force_phi_matches_library(rng):
    from regretlearn.solver import phi
    for _ in range(50):
        inst = TinyInstance.random(rng, 3, 3, 3, outcomes=4, zero_one=False)
        tau = rng.dirichlet(np.ones(3))
        assert brute_force_phi(inst, tau) == pytest.approx(
            phi(inst.object, inst.loss, inst.source, tau), abs=1e-12)

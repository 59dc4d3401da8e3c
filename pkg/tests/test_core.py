import numpy as np
import pytest
from hypothesis import given, strategies as st

from regretlearn.core import (
    ConfigurationError,
    FiniteComplexObject,
    LossMatrix,
    Strategy,
    WeightFunction,
    bayes_strategy,
    mix,
    optimal_risk,
    optimal_risks,
    optimal_strategy,
    predominates,
    regret,
    regrets,
    risk,
    risks,
)
from regretlearn.gaussian import corner_strategy
from regretlearn.oracles import (
    TinyInstance,
    brute_force_optimal,
    deterministic_risk_table,
    domination_search,
    risk_by_sum,
)

from conftest import random_object
from strategies import losses, objects, strategies_for, weights

PHI_MINUS_1 = 0.1586552539314571  # mpmath, scripts/derive_oracle_values.py
CORNER_RISK_2D = 0.3676108952858905


def test_object_rejects_unnormalized_model():
    joint = np.full((2, 2, 2), 0.25)
    joint[0, 0, 1] = 0.3
    with pytest.raises(ConfigurationError, match="model 1"):
        FiniteComplexObject(joint)


def test_object_arrays_are_read_only(rng):
    obj = random_object(rng)
    with pytest.raises(ValueError):
        obj.joint[0, 0, 0] = 1.0


def test_marginals(rng):
    obj = random_object(rng, 3, 2, 4)
    np.testing.assert_allclose(obj.signal_marginal().sum(axis=0), 1.0)
    np.testing.assert_allclose(obj.state_marginal(), obj.joint.sum(axis=0))


def test_strategy_rows_must_sum_to_one():
    with pytest.raises(ConfigurationError):
        Strategy(np.array([[0.5, 0.4]]))


def test_weights_reject_off_simplex():
    with pytest.raises(ConfigurationError):
        WeightFunction(np.array([0.7, 0.7]))


def test_risk_matches_literal_sum(rng):
    obj = random_object(rng, 3, 3, 2)
    loss = LossMatrix(rng.random((3, 3)))
    q = Strategy(rng.dirichlet(np.ones(3), size=3))
    for t in range(2):
        assert risk(obj, loss, q, t) == pytest.approx(risk_by_sum(obj, loss, q, t), abs=1e-12)


def test_robbins_optimal_is_threshold(robbins, zero_one):
    obj, x = robbins.object, robbins.signal_values
    for t, theta in enumerate(robbins.thetas):
        if theta in (0.0, 1.0):
            continue
        alpha = 0.5 * np.log((1 - theta) / theta)
        d = optimal_strategy(obj, zero_one, t).decisions
        # away from the grid cell that straddles alpha the rule is exact
        far = np.abs(x - alpha) > 0.011
        np.testing.assert_array_equal(d[far], np.where(x[far] >= alpha, 0, 1))


def test_zero_loss_picks_first_state(rng):
    obj = random_object(rng, 3, 3, 2)
    d = optimal_strategy(obj, LossMatrix(np.zeros((3, 3))), 1).decisions
    np.testing.assert_array_equal(d, 0)


def test_optimal_matches_brute_force(rng):
    for _ in range(20):
        inst = TinyInstance.random(rng, 2, 2, 2, zero_one=False)
        for t in range(2):
            q, value = brute_force_optimal(inst.object, inst.loss, t)
            assert optimal_risk(inst.object, inst.loss, t) == pytest.approx(value, abs=1e-12)
            assert optimal_strategy(inst.object, inst.loss, t) == q


def test_robbins_optimal_risk_at_half(robbins, zero_one):
    t = int(np.argmin(np.abs(robbins.thetas - 0.5)))
    assert optimal_risk(robbins.object, zero_one, t) == pytest.approx(PHI_MINUS_1, abs=2e-3)


def test_optimal_risk_zero_loss(rng):
    obj = random_object(rng)
    assert optimal_risk(obj, LossMatrix(np.zeros((2, 2))), 0) == 0.0


def test_optimal_risk_single_state(rng):
    joint = rng.random((3, 1, 2))
    obj = FiniteComplexObject(joint / joint.sum(axis=(0, 1), keepdims=True))
    loss = LossMatrix(np.array([[0.3]]))
    np.testing.assert_allclose(optimal_risks(obj, loss), 0.3)


def test_bayes_point_mass_is_optimal(rng):
    obj = random_object(rng, 4, 3, 3)
    loss = LossMatrix(rng.random((3, 3)))
    for t in range(3):
        assert bayes_strategy(obj, loss, WeightFunction.point_mass(3, t)) == optimal_strategy(obj, loss, t)


def test_two_d_example_risks(two_d, zero_one):
    obj = two_d.object
    corner = corner_strategy(two_d)
    bayes = bayes_strategy(obj, zero_one, [0.5, 0.5])
    np.testing.assert_allclose(risks(obj, zero_one, corner), CORNER_RISK_2D, atol=1e-3)
    np.testing.assert_allclose(risks(obj, zero_one, bayes), 0.35, atol=5e-3)
    assert predominates(obj, zero_one, bayes, corner)
    r = regrets(obj, zero_one, corner)
    np.testing.assert_allclose(r, CORNER_RISK_2D - optimal_risks(obj, zero_one), atol=1e-3)


def test_bayes_beats_random_strategies(rng):
    obj = random_object(rng, 3, 3, 3)
    loss = LossMatrix(rng.random((3, 3)))
    tau = rng.dirichlet(np.ones(3))
    best = risks(obj, loss, bayes_strategy(obj, loss, tau)) @ tau
    for _ in range(100):
        q = Strategy(rng.dirichlet(np.ones(3), size=3))
        assert best <= risks(obj, loss, q) @ tau + 1e-12


def test_zero_one_fast_path_agrees(rng):
    for _ in range(200):
        obj = random_object(rng, 4, 3, 3)
        tau = rng.dirichlet(np.ones(3))
        loss = LossMatrix.zero_one(3)
        assert bayes_strategy(obj, loss, tau) == bayes_strategy(obj, loss, tau, fast_zero_one=True)


def test_regret_of_optimal_is_zero(rng):
    obj = random_object(rng, 3, 2, 3)
    loss = LossMatrix.zero_one(2)
    for t in range(3):
        assert regret(obj, loss, optimal_strategy(obj, loss, t), t) == pytest.approx(0.0, abs=1e-15)


def test_regret_matches_oracles(rng):
    inst = TinyInstance.random(rng, 3, 2, 2, zero_one=False)
    q = Strategy(rng.dirichlet(np.ones(2), size=3))
    for t in range(2):
        expected = risk_by_sum(inst.object, inst.loss, q, t) - brute_force_optimal(inst.object, inst.loss, t)[1]
        assert regret(inst.object, inst.loss, q, t) == pytest.approx(expected, abs=1e-12)


def test_predominates_is_strict(rng):
    obj = random_object(rng)
    q = Strategy.uniform(2, 2)
    assert not predominates(obj, LossMatrix.zero_one(2), q, q)


def test_predominates_single_model(rng):
    obj = random_object(rng, 3, 2, 1)
    loss = LossMatrix.zero_one(2)
    opt = optimal_strategy(obj, loss, 0)
    worse = Strategy.deterministic(1 - opt.decisions, 2)
    assert predominates(obj, loss, opt, worse)


# properties


@given(objects(), st.data(), st.floats(0, 1))
def test_risk_is_linear(obj, data, lam):
    loss = data.draw(losses(obj.state_count))
    q1 = data.draw(strategies_for(obj.signal_count, obj.state_count))
    q2 = data.draw(strategies_for(obj.signal_count, obj.state_count))
    mixed = risks(obj, loss, mix(lam, q1, q2))
    np.testing.assert_allclose(mixed, lam * risks(obj, loss, q1) + (1 - lam) * risks(obj, loss, q2),
                               atol=1e-9)


@given(objects(), st.data())
def test_optimal_risk_is_a_lower_bound(obj, data):
    loss = data.draw(losses(obj.state_count))
    q = data.draw(strategies_for(obj.signal_count, obj.state_count))
    assert np.all(optimal_risks(obj, loss) <= risks(obj, loss, q) + 1e-12)


@given(objects(), st.data())
def test_bayes_minimal_over_enumeration(obj, data):
    loss = data.draw(losses(obj.state_count))
    tau = data.draw(weights(obj.model_count))
    value = risks(obj, loss, bayes_strategy(obj, loss, tau)) @ tau
    assert value <= (deterministic_risk_table(obj, loss) @ tau).min() + 1e-9
    q = data.draw(strategies_for(obj.signal_count, obj.state_count))
    assert value <= risks(obj, loss, q) @ tau + 1e-9


@given(objects(), st.data())
def test_bayes_never_predominated(obj, data):
    loss = data.draw(losses(obj.state_count))
    tau = data.draw(weights(obj.model_count))
    assert domination_search((obj, loss), bayes_strategy(obj, loss, tau)) is None


# powers of two rescale exactly, so rounding cannot flip a tie
@given(objects(), st.data(), st.integers(-10, 10))
def test_bayes_scale_invariant(obj, data, k):
    scale = 2.0 ** k
    loss = data.draw(losses(obj.state_count))
    tau = data.draw(weights(obj.model_count))
    assert bayes_strategy(obj, loss, tau) == bayes_strategy(obj, loss, tau * scale)

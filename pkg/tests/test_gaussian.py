import numpy as np
import pytest

from regretlearn.core import ConfigurationError, LossMatrix, optimal_risks, risks
from regretlearn.gaussian import (
    DEFAULT_GRIDS,
    GaussianExampleSpec,
    Grid1D,
    ThresholdRule,
    consistent_estimate,
    consistent_estimate_strategy,
    corner_strategy,
    discretize,
    gaussian_cdf,
    heuristic_procedure,
    heuristic_procedure_risk,
    robbins_alpha,
    robbins_heuristic_strategy,
)
from regretlearn.learning import (
    LearningProblem,
    Quantizer,
    no_learning_source,
    quantized_signal_source,
    state_sample_source,
)

PHI_1 = 0.8413447460685429  # mpmath, scripts/derive_oracle_values.py
PHI_MINUS_1 = 0.1586552539314571
CORNER_RISK_2D = 0.3676108952858905
ALPHA_N4_SUM2 = -0.5493061443340548


def test_cdf_values():
    assert gaussian_cdf(0.0) == 0.5
    assert gaussian_cdf(1.0) == pytest.approx(PHI_1, abs=1e-10)
    assert gaussian_cdf(-1.0) == pytest.approx(1 - gaussian_cdf(1.0), abs=1e-15)


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        Grid1D(0.0, 1.0, 0.3)
    with pytest.raises(ConfigurationError):
        Grid1D(0.0, 1.0, -0.1)
    assert Grid1D(-1.0, 1.0, 0.5).size == 4


def test_cell_masses_sum_to_one():
    g = Grid1D(-6.0, 6.0, 0.01)
    m = g.cell_masses(0.7)
    assert m.sum() == pytest.approx(1.0, abs=1e-14)
    assert m.min() >= 0


def test_coverage_error_names_model():
    with pytest.raises(ConfigurationError, match="theta=6"):
        discretize(GaussianExampleSpec.two_mean(0.2), Grid1D(-10.0, 5.0, 0.02))


def test_robbins_endpoint_model():
    p = discretize(GaussianExampleSpec.robbins(thetas=[0.0, 1.0]))
    np.testing.assert_allclose(p.object.joint[:, 1, 1], 0.0)
    assert p.object.joint[:, 0, 1].sum() == pytest.approx(1.0)


def test_robbins_optimal_risk_on_default_grid(robbins):
    zero_one = LossMatrix.zero_one(2)
    t = int(np.argmin(np.abs(robbins.thetas - 0.5)))
    assert optimal_risks(robbins.object, zero_one)[t] == pytest.approx(PHI_MINUS_1, abs=2e-3)


def test_two_d_corner_risk(two_d):
    r = risks(two_d.object, LossMatrix.zero_one(2), corner_strategy(two_d))
    assert r[0] == pytest.approx(CORNER_RISK_2D, abs=1e-3)


@pytest.mark.parametrize("spec", [
    GaussianExampleSpec.robbins(0.05),
    GaussianExampleSpec.two_mean(0.2),
    GaussianExampleSpec.two_model_2d(),
], ids=["robbins", "two-mean", "2d"])
def test_halving_grid_step_is_stable(spec):
    loss = LossMatrix.zero_one(2)
    g = DEFAULT_GRIDS[spec.variant]
    coarse = optimal_risks(discretize(spec, g).object, loss)
    fine = optimal_risks(discretize(spec, Grid1D(g.lower, g.upper, g.step / 2)).object, loss)
    assert np.abs(coarse - fine).max() < 1e-3


def test_robbins_alpha_examples():
    assert robbins_heuristic_strategy([0.5, -0.5]).alpha == 0.0
    assert robbins_alpha(4, 2.0) == pytest.approx(ALPHA_N4_SUM2, abs=1e-12)
    rule = robbins_heuristic_strategy([2.0])
    assert rule.alpha == -50.0 and rule.decide(-10.0) == 0
    assert robbins_alpha(1, -3.0) == 50.0


def test_robbins_alpha_formula(rng):
    for _ in range(200):
        n = int(rng.integers(1, 30))
        total = float(rng.uniform(-0.99, 0.99) * n)
        assert robbins_alpha(n, total) == pytest.approx(0.5 * np.log((n - total) / (n + total)), abs=1e-12)


def test_consistent_estimates():
    assert consistent_estimate("robbins", [0.0]) == 0.5
    assert consistent_estimate("robbins", [0.5, 0.5, 0.5, 0.5]) == 0.75
    assert consistent_estimate("two-mean", [1.0, 1.1]) == pytest.approx(2.1)
    with pytest.raises(ConfigurationError):
        consistent_estimate("two-model-2d", [0.0])


def test_snap_ties_go_low(robbins):
    two_mean = discretize(GaussianExampleSpec.two_mean(0.2))
    assert two_mean.thetas[two_mean.snap(2.1)] == pytest.approx(2.0)
    assert robbins.thetas[robbins.snap(0.75)] == pytest.approx(0.75)
    assert robbins.thetas[robbins.snap(1.7)] == 1.0


def test_consistent_strategy_is_optimal_at_estimate(robbins):
    loss = LossMatrix.zero_one(2)
    s = consistent_estimate_strategy(robbins, loss, [0.5, 0.5, 0.5, 0.5])
    t = robbins.snap(0.75)
    np.testing.assert_allclose(risks(robbins.object, loss, s)[t], optimal_risks(robbins.object, loss)[t])


def test_heuristics_reject_empty_sample(robbins):
    loss = LossMatrix.zero_one(2)
    src = no_learning_source(robbins.thetas.size)
    for kind in ("ml-supervised", "ml-unsupervised", "robbins", "consistent"):
        with pytest.raises(ConfigurationError, match="meaningless without data"):
            heuristic_procedure(robbins, loss, src, kind)


def test_robbins_single_cell_is_one_threshold(robbins):
    loss = LossMatrix.zero_one(2)
    q = Quantizer.single_cell(robbins.object.signal_count, center=0.25)
    src = quantized_signal_source(robbins.object, 1, q)
    strategy = ThresholdRule(robbins_alpha(1, 0.25)).strategy(robbins)
    expected = risks(robbins.object, loss, strategy)
    for t in range(robbins.thetas.size):
        assert heuristic_procedure_risk(robbins, loss, "robbins", t, src, q) == pytest.approx(expected[t])


def test_ml_supervised_example_one_n1(robbins):
    loss = LossMatrix.zero_one(2)
    th = robbins.thetas
    for compressed in (True, False):
        src = state_sample_source(robbins.object, 1, compressed=compressed)
        r = [heuristic_procedure_risk(robbins, loss, "ml-supervised", t, src) for t in range(th.size)]
        # one label pins the estimate to an endpoint model
        np.testing.assert_allclose(r, 2 * th * (1 - th), atol=1e-12)


def test_consistent_improves_with_data(robbins):
    loss = LossMatrix.zero_one(2)
    q = Quantizer.uniform(robbins.signal_values, -4.0, 4.0, 2.0)
    opt = optimal_risks(robbins.object, loss)
    interior = [robbins.snap(v) for v in (0.3, 0.5, 0.7)]

    def regret(n):
        src = quantized_signal_source(robbins.object, n, q)
        proc = heuristic_procedure(robbins, loss, src, "consistent", q)
        return LearningProblem(robbins.object, loss, src).expected_risks(proc) - opt

    r1, r50 = regret(1), regret(50)
    for t in interior:
        assert r50[t] < r1[t]


def test_heuristic_needs_quantizer(robbins):
    loss = LossMatrix.zero_one(2)
    src = state_sample_source(robbins.object, 2)
    with pytest.raises(ConfigurationError, match="quantized"):
        heuristic_procedure(robbins, loss, src, "robbins")


def test_corner_needs_two_d(robbins):
    with pytest.raises(ConfigurationError):
        corner_strategy(robbins)

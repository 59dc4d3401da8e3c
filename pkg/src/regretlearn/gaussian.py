"""Unit-variance Gaussian examples discretized into finite complex objects.

Three layouts are supported:

* ``robbins``: states 1 and 2 with means +1 and -1, P(state 1) = theta.
* ``two-mean``: equal priors, state 1 has mean 0, state 2 has mean theta.
* ``two-model-2d``: two independent coordinates, equal priors, state A at
  (0, 0) and state B at (0, 1) under model 1 or (1, 0) under model 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .core import ConfigurationError, FiniteComplexObject, LossMatrix, Strategy, optimal_decisions
from .learning import (
    LearningSource,
    Quantizer,
    TableProcedure,
    LearningProblem,
    ml_source_procedure,
    ml_unsupervised_estimate,
)

VARIANTS = ("robbins", "two-mean", "two-model-2d")
ALPHA_CLAMP = 50.0
COVERAGE_SIGMAS = 4.0


def gaussian_cdf(x):
    """Standard normal CDF; accepts scalars or arrays."""
    out = ndtr(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Grid1D:
    lower: float
    upper: float
    step: float

    def __post_init__(self):
        if not self.step > 0 or not self.upper > self.lower:
            raise ConfigurationError("grid needs step > 0 and upper > lower")
        cells = (self.upper - self.lower) / self.step
        if abs(cells - round(cells)) > 1e-6:
            raise ConfigurationError(
                f"grid range {self.upper - self.lower} is not a whole number of steps {self.step}"
            )

    @property
    def size(self) -> int:
        return int(round((self.upper - self.lower) / self.step))

    @property
    def edges(self) -> np.ndarray:
        return self.lower + self.step * np.arange(self.size + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.lower + self.step * (np.arange(self.size) + 0.5)

    def cell_masses(self, mean: float) -> np.ndarray:
        """N(mean, 1) mass per cell; the tails are folded into the two end cells."""
        cdf = gaussian_cdf(self.edges - mean)
        mass = np.diff(cdf)
        mass[0] += cdf[0]
        mass[-1] += 1.0 - cdf[-1]
        return mass


def theta_grid(lower: float, upper: float, step: float) -> np.ndarray:
    count = int(round((upper - lower) / step))
    return np.round(lower + step * np.arange(count + 1), 12)


@dataclass(frozen=True, eq=False)
class GaussianExampleSpec:
    variant: str
    thetas: np.ndarray
    means: tuple = field(default=())

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}")
        thetas = np.asarray(self.thetas, dtype=float)
        if thetas.ndim != 1 or thetas.size == 0:
            raise ConfigurationError("need at least one model")
        if self.variant == "robbins" and (thetas.min() < 0 or thetas.max() > 1):
            raise ConfigurationError("robbins models are state-1 priors in [0, 1]")
        object.__setattr__(self, "thetas", thetas)

    @classmethod
    def robbins(cls, theta_step: float = 0.05, thetas=None) -> "GaussianExampleSpec":
        if thetas is None:
            thetas = theta_grid(0.0, 1.0, theta_step)
        return cls("robbins", thetas, means=(1.0, -1.0))

    @classmethod
    def two_mean(cls, theta_step: float = 0.2, thetas=None) -> "GaussianExampleSpec":
        if thetas is None:
            thetas = theta_grid(-6.0, 6.0, theta_step)
        return cls("two-mean", thetas, means=(0.0, None))

    @classmethod
    def two_model_2d(cls) -> "GaussianExampleSpec":
        return cls("two-model-2d", np.array([1.0, 2.0]), means=((0.0, 0.0), None))

    def component_means(self, model: int) -> list:
        """(prior, mean) per state under the given model; 2d means are pairs."""
        t = float(self.thetas[model])
        if self.variant == "robbins":
            return [(t, 1.0), (1.0 - t, -1.0)]
        if self.variant == "two-mean":
            return [(0.5, 0.0), (0.5, t)]
        b_mean = (0.0, 1.0) if model == 0 else (1.0, 0.0)
        return [(0.5, (0.0, 0.0)), (0.5, b_mean)]


DEFAULT_GRIDS = {
    "robbins": Grid1D(-6.0, 6.0, 0.01),
    "two-mean": Grid1D(-10.0, 10.0, 0.02),
    "two-model-2d": Grid1D(-5.0, 6.0, 0.05),
}


@dataclass(frozen=True, eq=False)
class GaussianProblem:
    """A discretized example: the finite object plus its coordinates."""

    spec: GaussianExampleSpec
    grid: Grid1D
    object: FiniteComplexObject
    signal_values: np.ndarray  # (X,) or (X, 2) cell centres

    @property
    def thetas(self) -> np.ndarray:
        return self.spec.thetas

    def snap(self, value: float) -> int:
        """Nearest model index, clamped to the model range; ties go to the lower model."""
        t = self.thetas
        v = min(max(value, t.min()), t.max())
        d = np.abs(t - v)
        return int(np.flatnonzero(d <= d.min() + 1e-9)[0])


def _check_coverage(spec: GaussianExampleSpec, grid: Grid1D) -> None:
    worst, worst_gap = None, 0.0
    for m in range(spec.thetas.size):
        for _, mean in spec.component_means(m):
            for mu in np.atleast_1d(mean):
                gap = max(grid.lower - (mu - COVERAGE_SIGMAS), (mu + COVERAGE_SIGMAS) - grid.upper)
                if gap > 1e-12 and gap > worst_gap:
                    worst, worst_gap = m, gap
    if worst is not None:
        raise ConfigurationError(
            f"grid [{grid.lower}, {grid.upper}] does not cover mean +/- {COVERAGE_SIGMAS:g} sigma; "
            f"worst model is theta={spec.thetas[worst]:g} (short by {worst_gap:g})"
        )


def discretize(spec: GaussianExampleSpec, grid: Grid1D | None = None) -> GaussianProblem:
    """Cell probabilities from CDF differences times the state priors.

    For the 2d layout ``grid`` is the per-axis grid of a product grid.
    """
    grid = grid or DEFAULT_GRIDS[spec.variant]
    _check_coverage(spec, grid)
    models = spec.thetas.size
    if spec.variant == "two-model-2d":
        size = grid.size
        joint = np.zeros((size * size, 2, models))
        for m in range(models):
            for y, (prior, (mu1, mu2)) in enumerate(spec.component_means(m)):
                joint[:, y, m] = prior * np.outer(grid.cell_masses(mu1), grid.cell_masses(mu2)).ravel()
        c = grid.centers
        values = np.stack(np.meshgrid(c, c, indexing="ij"), axis=-1).reshape(-1, 2)
        states = ("A", "B")
    else:
        joint = np.zeros((grid.size, 2, models))
        cache = {}
        for m in range(models):
            for y, (prior, mu) in enumerate(spec.component_means(m)):
                if mu not in cache:
                    cache[mu] = grid.cell_masses(mu)
                joint[:, y, m] = prior * cache[mu]
        values = grid.centers
        states = ("1", "2")
    obj = FiniteComplexObject(joint, state_labels=states,
                              model_labels=[f"{t:g}" for t in spec.thetas])
    return GaussianProblem(spec, grid, obj, values)


def corner_strategy(problem: GaussianProblem, cut: float = 0.5) -> Strategy:
    """2d layout: decide A iff both coordinates are at most ``cut``."""
    if problem.spec.variant != "two-model-2d":
        raise ConfigurationError("corner strategy is defined for the 2d layout only")
    v = problem.signal_values
    in_a = (v[:, 0] <= cut) & (v[:, 1] <= cut)
    return Strategy.deterministic(np.where(in_a, 0, 1), 2)


# ---------------------------------------------------------------------------
# heuristics


@dataclass(frozen=True)
class ThresholdRule:
    """Decide state 1 (index 0) iff x >= alpha."""

    alpha: float

    def decide(self, x: float) -> int:
        return 0 if x >= self.alpha else 1

    def strategy(self, problem: GaussianProblem) -> Strategy:
        return Strategy.deterministic(np.where(problem.signal_values >= self.alpha, 0, 1), 2)


def robbins_alpha(n: int, total: float) -> float:
    """alpha = 1/2 ln((n - sum x) / (n + sum x)), clamped to [-50, 50]."""
    if n <= 0:
        raise ConfigurationError("sample must be non-empty")
    num, den = n - total, n + total
    if num <= 0:
        return -ALPHA_CLAMP
    if den <= 0:
        return ALPHA_CLAMP
    return float(np.clip(0.5 * np.log(num / den), -ALPHA_CLAMP, ALPHA_CLAMP))


def robbins_heuristic_strategy(signal_sample) -> ThresholdRule:
    xs = np.asarray(signal_sample, dtype=float).ravel()
    return ThresholdRule(robbins_alpha(xs.size, float(xs.sum())))


def consistent_estimate(variant: str, signal_sample) -> float:
    xs = np.asarray(signal_sample, dtype=float).ravel()
    if xs.size == 0:
        raise ConfigurationError("sample must be non-empty")
    if variant == "robbins":
        return float(xs.sum() / (2 * xs.size) + 0.5)
    if variant == "two-mean":
        return float(2.0 * xs.sum() / xs.size)
    raise ConfigurationError(f"no consistent estimate for variant {variant!r}")


def consistent_estimate_strategy(problem: GaussianProblem, loss: LossMatrix,
                                 signal_sample) -> Strategy:
    """Optimal strategy at the grid model nearest the consistent estimate."""
    model = problem.snap(consistent_estimate(problem.spec.variant, signal_sample))
    return Strategy.deterministic(optimal_decisions(problem.object, loss)[:, model], 2)


HEURISTICS = ("ml-supervised", "ml-unsupervised", "robbins", "consistent")


def heuristic_procedure(problem: GaussianProblem, loss: LossMatrix, source: LearningSource,
                        kind: str, quantizer: Quantizer | None = None) -> TableProcedure:
    """Apply an estimate-based heuristic to every outcome of ``source``.

    ``ml-supervised`` maximizes the source likelihood p(z; theta). The other
    kinds read signal samples, so the source must consist of quantizer cells;
    each cell is replaced by its representative signal.
    """
    if kind not in HEURISTICS:
        raise ConfigurationError(f"unknown heuristic {kind!r}")
    if source.outcome_count == 1 and (source.samples is None or len(source.samples[0]) == 0):
        raise ConfigurationError(
            f"{kind} needs a learning sample: a model estimate is meaningless without data (n=0)"
        )
    obj = problem.object
    if kind == "ml-supervised":
        return ml_source_procedure(obj, loss, source)
    if source.cell_kind != "signal-cell" or quantizer is None:
        raise ConfigurationError(f"{kind} needs a quantized signal source and its quantizer")
    samples = np.array(source.samples, dtype=int)
    if kind == "robbins":
        sums = quantizer.centers[samples].sum(axis=1)
        alpha = np.array([robbins_alpha(samples.shape[1], s) for s in sums])
        table = np.where(problem.signal_values[None, :] >= alpha[:, None], 0, 1)
        return TableProcedure(decisions=table, state_count=2)
    opt = optimal_decisions(obj, loss).T  # (Theta, X)
    if kind == "consistent":
        models = [problem.snap(consistent_estimate(problem.spec.variant, quantizer.centers[s]))
                  for s in samples]
    else:
        models = [ml_unsupervised_estimate(obj, quantizer.rep_index[s]) for s in samples]
    return TableProcedure(decisions=opt[np.array(models)], state_count=obj.state_count)


def heuristic_procedure_risk(problem: GaussianProblem, loss: LossMatrix, kind: str, model: int,
                             source: LearningSource, quantizer: Quantizer | None = None) -> float:
    """Exact R_Z of the heuristic procedure under ``model``."""
    proc = heuristic_procedure(problem, loss, source, kind, quantizer)
    return float(LearningProblem(problem.object, loss, source).expected_risks(proc)[model])

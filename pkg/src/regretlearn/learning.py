"""Learning-information sources and learning procedures.

A source is a table ``p[z, theta]``; given the model it is independent of the
current signal and state. A procedure maps each outcome ``z`` to a strategy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .core import (
    NORM_TOL,
    ConfigurationError,
    FiniteComplexObject,
    LossMatrix,
    Strategy,
    WeightFunction,
    _weights_array,
    decision_costs,
    optimal_risks,
    optimal_strategy,
)

DEFAULT_OUTCOME_BUDGET = 5_000_000

# decision tables are evaluated in chunks of roughly this many (z, x, y') cells
_CHUNK_CELLS = 4_000_000


class ImpossibleSampleError(ValueError):
    """The sample has zero likelihood under every model."""


class BudgetError(ValueError):
    """An enumerated source would exceed the outcome budget."""


@dataclass(frozen=True, eq=False)
class LearningSource:
    """Finite source of learning information with probabilities p[z, theta].

    ``samples`` optionally records, per outcome, the sample it stands for as a
    tuple of cell indices (sorted for multiset outcomes); ``cell_kind`` says
    what those cells are: ``"pair"`` (index x*|Y| + y), ``"state"`` or
    ``"signal-cell"`` (quantizer cells).
    """

    prob: np.ndarray
    descriptors: tuple[str, ...] | None = None
    samples: tuple[tuple[int, ...], ...] | None = None
    cell_kind: str | None = None
    multiset: bool = True

    def __post_init__(self):
        p = np.array(self.prob, dtype=float)
        if p.ndim != 2 or 0 in p.shape:
            raise ConfigurationError(f"source table must be (Z, Theta), got {p.shape}")
        if not np.all(np.isfinite(p)) or p.min() < 0:
            raise ConfigurationError("source probabilities must be finite and non-negative")
        if np.max(np.abs(p.sum(axis=0) - 1.0)) > NORM_TOL:
            raise ConfigurationError("source probabilities must sum to 1 for every model")
        p.setflags(write=False)
        object.__setattr__(self, "prob", p)
        for name in ("descriptors", "samples"):
            val = getattr(self, name)
            if val is not None:
                val = tuple(val)
                if len(val) != p.shape[0]:
                    raise ConfigurationError(f"{name}: expected {p.shape[0]} entries")
                object.__setattr__(self, name, val)

    @property
    def outcome_count(self) -> int:
        return self.prob.shape[0]

    @property
    def model_count(self) -> int:
        return self.prob.shape[1]

    @property
    def sample_size(self) -> int | None:
        if self.samples is None:
            return None
        return len(self.samples[0])


def no_learning_source(model_count: int) -> LearningSource:
    """Z = {0} with p(0; theta) = 1: learning information is absent."""
    return LearningSource(np.ones((1, model_count)), descriptors=("none",), samples=((),))


def _multiset_probs(counts: np.ndarray, cell_prob: np.ndarray) -> np.ndarray:
    """Multinomial probability of each count vector under each model."""
    n = int(counts[0].sum())
    log_coef = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1)
    with np.errstate(divide="ignore"):
        log_p = np.log(cell_prob)
    impossible = (counts > 0).astype(float) @ (cell_prob == 0).astype(float) > 0
    safe = np.where(np.isfinite(log_p), log_p, 0.0)
    out = np.exp(log_coef[:, None] + counts @ safe)
    out[impossible] = 0.0
    return out


def iid_sample_source(cell_prob: np.ndarray, n: int, *, cell_kind: str,
                      compressed: bool = True, budget: int = DEFAULT_OUTCOME_BUDGET,
                      cell_names: Sequence[str] | None = None) -> LearningSource:
    """Source of n i.i.d. draws over cells with per-model probabilities cell_prob[b, theta].

    Compressed outcomes are multisets (count vectors) with multinomial
    probabilities; uncompressed outcomes are ordered sequences.
    """
    cell_prob = np.asarray(cell_prob, dtype=float)
    cells, models = cell_prob.shape
    if n < 0:
        raise ConfigurationError("sample size must be non-negative")
    if n == 0:
        src = no_learning_source(models)
        return LearningSource(src.prob, src.descriptors, src.samples, cell_kind, compressed)
    size = math.comb(cells + n - 1, n) if compressed else cells ** n
    if size > budget:
        raise BudgetError(f"{size} outcomes exceed the outcome budget of {budget}")
    names = list(cell_names) if cell_names is not None else [str(b) for b in range(cells)]
    if compressed:
        samples = list(itertools.combinations_with_replacement(range(cells), n))
        counts = np.zeros((len(samples), cells))
        for i, s in enumerate(samples):
            np.add.at(counts[i], list(s), 1)
        prob = _multiset_probs(counts, cell_prob)
        desc = ["{" + ",".join(names[b] for b in s) + "}" for s in samples]
    else:
        samples = list(itertools.product(range(cells), repeat=n))
        idx = np.array(samples)
        prob = np.prod(cell_prob[idx], axis=1)
        desc = ["(" + ",".join(names[b] for b in s) + ")" for s in samples]
    # re-normalize away multinomial rounding only; the sum is 1 analytically
    prob = prob / prob.sum(axis=0, keepdims=True)
    return LearningSource(prob, tuple(desc), tuple(samples), cell_kind, compressed)


def supervised_source(obj: FiniteComplexObject, n: int, compressed: bool = True,
                      budget: int = DEFAULT_OUTCOME_BUDGET) -> LearningSource:
    """n labelled pairs (x_i, y_i); cells are pair indices x*|Y| + y."""
    cell_prob = obj.joint.reshape(obj.signal_count * obj.state_count, obj.model_count)
    names = [f"{x}:{y}" for x in range(obj.signal_count) for y in range(obj.state_count)]
    return iid_sample_source(cell_prob, n, cell_kind="pair", compressed=compressed,
                             budget=budget, cell_names=names)


def state_sample_source(obj: FiniteComplexObject, n: int, compressed: bool = True,
                        budget: int = DEFAULT_OUTCOME_BUDGET) -> LearningSource:
    """n observed states only; compressed outcomes are state counts."""
    names = obj.state_labels or [str(y) for y in range(obj.state_count)]
    return iid_sample_source(obj.state_marginal(), n, cell_kind="state",
                             compressed=compressed, budget=budget, cell_names=names)


@dataclass(frozen=True, eq=False)
class Quantizer:
    """Maps fine signal indices onto coarse cells.

    ``cell_of[x]`` is the cell of fine signal x, ``centers[b]`` the
    representative signal value of cell b and ``rep_index[b]`` the fine
    signal nearest to it.
    """

    cell_of: np.ndarray
    centers: np.ndarray
    rep_index: np.ndarray

    def __post_init__(self):
        cell_of = np.asarray(self.cell_of, dtype=int)
        if cell_of.min() < 0 or cell_of.max() >= len(self.centers):
            raise ConfigurationError("cell_of must index into centers")
        object.__setattr__(self, "cell_of", cell_of)
        object.__setattr__(self, "centers", np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "rep_index", np.asarray(self.rep_index, dtype=int))

    @property
    def cell_count(self) -> int:
        return len(self.centers)

    @classmethod
    def single_cell(cls, signal_count: int, center: float = 0.0) -> "Quantizer":
        return cls(np.zeros(signal_count, dtype=int), [center], [signal_count // 2])

    @classmethod
    def uniform(cls, signal_values: np.ndarray, lower: float, upper: float,
                width: float) -> "Quantizer":
        """Cells of ``width`` on [lower, upper]; the outer cells absorb everything beyond."""
        cells = int(round((upper - lower) / width))
        if cells < 1 or abs(cells * width - (upper - lower)) > 1e-9 * max(1.0, abs(upper - lower)):
            raise ConfigurationError("quantizer range must be a whole number of cells")
        values = np.asarray(signal_values, dtype=float)
        cell_of = np.clip(np.floor((values - lower) / width + 1e-12).astype(int), 0, cells - 1)
        centers = lower + (np.arange(cells) + 0.5) * width
        rep = np.abs(values[None, :] - centers[:, None]).argmin(axis=1)
        return cls(cell_of, centers, rep)

    def cell_probabilities(self, obj: FiniteComplexObject, state: int | None = None) -> np.ndarray:
        """Per-cell probabilities (B, Theta) of a signal, optionally given the state."""
        if state is None:
            fine = obj.signal_marginal()
        else:
            fine = obj.joint[:, state, :]
            fine = fine / fine.sum(axis=0, keepdims=True)
        out = np.zeros((self.cell_count, obj.model_count))
        np.add.at(out, self.cell_of, fine)
        return out


def quantized_signal_source(obj: FiniteComplexObject, n: int, quantizer: Quantizer,
                            state: int | None = None, compressed: bool = True,
                            budget: int = DEFAULT_OUTCOME_BUDGET) -> LearningSource:
    """n i.i.d. quantized signals (optionally drawn given a fixed state)."""
    if len(quantizer.cell_of) != obj.signal_count:
        raise ConfigurationError("quantizer does not match the object's signal axis")
    names = [f"{c:g}" for c in quantizer.centers]
    return iid_sample_source(quantizer.cell_probabilities(obj, state), n,
                             cell_kind="signal-cell", compressed=compressed,
                             budget=budget, cell_names=names)


# ---------------------------------------------------------------------------
# procedures


class LearningProcedure:
    """A map from source outcomes z to strategies."""

    outcome_count: int

    def strategy_for(self, z: int) -> Strategy:
        raise NotImplementedError

    def decision_table(self) -> np.ndarray | None:
        """Decisions d[z, x] if every strategy is deterministic, else None."""
        raise NotImplementedError


class TableProcedure(LearningProcedure):
    """Explicit procedure: one strategy per outcome."""

    def __init__(self, strategies: Sequence[Strategy] | None = None,
                 decisions: np.ndarray | None = None, state_count: int | None = None):
        if (strategies is None) == (decisions is None):
            raise ConfigurationError("give either strategies or a decision table")
        if decisions is not None:
            d = np.array(decisions, dtype=int)
            if d.ndim != 2 or state_count is None:
                raise ConfigurationError("decision table must be (Z, X) with a state count")
            d.setflags(write=False)
            self._decisions = d
            self._strategies = None
            self.state_count = state_count
            self.outcome_count = d.shape[0]
        else:
            self._strategies = tuple(strategies)
            if not self._strategies:
                raise ConfigurationError("procedure needs at least one strategy")
            self.state_count = self._strategies[0].state_count
            self.outcome_count = len(self._strategies)
            if all(s.is_deterministic() for s in self._strategies):
                self._decisions = np.stack([s.decisions for s in self._strategies])
            else:
                self._decisions = None

    def strategy_for(self, z: int) -> Strategy:
        if self._strategies is not None:
            return self._strategies[z]
        return Strategy.deterministic(self._decisions[z], self.state_count)

    def decision_table(self) -> np.ndarray | None:
        return self._decisions


class LearningProblem:
    """Object, loss and source bundled with cached derived tables."""

    def __init__(self, obj: FiniteComplexObject, loss: LossMatrix, source: LearningSource):
        if source.model_count != obj.model_count:
            raise ConfigurationError(
                f"source has {source.model_count} models, object has {obj.model_count}"
            )
        self.object = obj
        self.loss = loss
        self.source = source

    @cached_property
    def costs(self) -> np.ndarray:
        """c[y', x, theta], contiguous per decision."""
        return np.ascontiguousarray(np.moveaxis(decision_costs(self.object, self.loss), 1, 0))

    @cached_property
    def optimal_risks(self) -> np.ndarray:
        return optimal_risks(self.object, self.loss)

    def posterior_weights(self, weights) -> np.ndarray:
        """Unnormalized per-outcome weights tau(theta) p(z; theta), rows rescaled to max 1.

        Outcomes impossible under every weighted model fall back to tau.
        """
        tau = _weights_array(weights, self.object.model_count)
        w = self.source.prob * tau[None, :]
        top = w.max(axis=1, keepdims=True)
        dead = top[:, 0] <= 0
        w = np.where(dead[:, None], tau[None, :] / tau.max(), w / np.where(dead[:, None], 1.0, top))
        return w

    def bayes_decisions(self, weights) -> np.ndarray:
        """Decision table d[z, x] of the Bayesian procedure for the weights."""
        post = self.posterior_weights(weights)
        n_z, n_x = post.shape[0], self.object.signal_count
        n_y = self.object.state_count
        out = np.empty((n_z, n_x), dtype=int)
        step = max(1, _CHUNK_CELLS // (n_x * n_y))
        for lo in range(0, n_z, step):
            block = post[lo:lo + step]
            best = block @ self.costs[0].T
            arg = np.zeros(best.shape, dtype=int)
            for d in range(1, n_y):
                score = block @ self.costs[d].T
                better = score < best
                best = np.where(better, score, best)
                arg[better] = d
            out[lo:lo + step] = arg
        return out

    def outcome_risks(self, decisions: np.ndarray) -> np.ndarray:
        """R_X(g(z), theta) for a decision table, shape (Z, Theta)."""
        out = np.zeros((decisions.shape[0], self.object.model_count))
        for d in range(self.object.state_count):
            out += (decisions == d).astype(float) @ self.costs[d]
        return out

    def expected_risks_of_decisions(self, decisions: np.ndarray) -> np.ndarray:
        """R_Z(g, theta) for a decision table, shape (Theta,)."""
        p = self.source.prob
        total = np.zeros(self.object.model_count)
        for d in range(self.object.state_count):
            mass = p.T @ (decisions == d).astype(float)  # (Theta, X)
            total += np.einsum("tx,xt->t", mass, self.costs[d])
        return total

    def expected_risks(self, procedure: LearningProcedure) -> np.ndarray:
        if procedure.outcome_count != self.source.outcome_count:
            raise ConfigurationError("procedure and source disagree on the number of outcomes")
        table = procedure.decision_table()
        if table is not None:
            return self.expected_risks_of_decisions(table)
        costs = np.moveaxis(self.costs, 0, 1)  # (X, Y', Theta)
        per_z = np.stack([
            np.einsum("xd,xdt->t", procedure.strategy_for(z).q, costs)
            for z in range(procedure.outcome_count)
        ])
        return np.einsum("zt,zt->t", self.source.prob, per_z)

    def bayes_procedure(self, weights) -> "BayesProcedure":
        return BayesProcedure(self, weights)


class BayesProcedure(LearningProcedure):
    """Implicit procedure: Bayes response to tau(theta) p(z; theta) for each z."""

    def __init__(self, problem: LearningProblem, weights):
        self.problem = problem
        tau = _weights_array(weights, problem.object.model_count)
        self.weights = WeightFunction(tau / tau.sum())
        self.outcome_count = problem.source.outcome_count
        self._table = None

    def decision_table(self) -> np.ndarray:
        if self._table is None:
            table = self.problem.bayes_decisions(self.weights)
            table.setflags(write=False)
            self._table = table
        return self._table

    def strategy_for(self, z: int) -> Strategy:
        return Strategy.deterministic(self.decision_table()[z], self.problem.object.state_count)


def expected_risk(obj: FiniteComplexObject, loss: LossMatrix, source: LearningSource,
                  procedure: LearningProcedure, model: int) -> float:
    """R_Z(g, theta) = sum_z p(z; theta) R_X(g(z), theta)."""
    if not 0 <= model < obj.model_count:
        raise ConfigurationError(f"model index {model} out of range")
    return float(LearningProblem(obj, loss, source).expected_risks(procedure)[model])


def bayes_learning_procedure(obj: FiniteComplexObject, loss: LossMatrix,
                             source: LearningSource, weights) -> BayesProcedure:
    return BayesProcedure(LearningProblem(obj, loss, source), weights)


# ---------------------------------------------------------------------------
# maximum likelihood


def _log_table(p: np.ndarray) -> np.ndarray:
    # a*log(0) = -inf for a > 0
    with np.errstate(divide="ignore"):
        return np.log(p)


def _argmax_model(logp: np.ndarray) -> int:
    # sorting first makes the sum, and so the estimate, independent of sample order
    loglik = np.sort(logp, axis=0).sum(axis=0)
    if np.all(loglik == -np.inf):
        raise ImpossibleSampleError("sample impossible under every model")
    return int(np.argmax(loglik))


def ml_supervised_estimate(obj: FiniteComplexObject, sample: Sequence[tuple[int, int]]) -> int:
    pairs = np.asarray(sample, dtype=int).reshape(-1, 2)
    if pairs.shape[0] == 0:
        raise ConfigurationError("sample must be non-empty")
    logp = _log_table(obj.joint[pairs[:, 0], pairs[:, 1], :])
    return _argmax_model(logp)


def ml_supervised_learn(obj: FiniteComplexObject, loss: LossMatrix,
                        sample: Sequence[tuple[int, int]]) -> Strategy:
    """Optimal strategy for argmax_theta prod_i p(x_i, y_i; theta)."""
    return optimal_strategy(obj, loss, ml_supervised_estimate(obj, sample))


def ml_unsupervised_estimate(obj: FiniteComplexObject, signals: Sequence[int]) -> int:
    xs = np.asarray(signals, dtype=int).ravel()
    if xs.size == 0:
        raise ConfigurationError("sample must be non-empty")
    logp = _log_table(obj.signal_marginal()[xs, :])
    return _argmax_model(logp)


def ml_unsupervised_learn(obj: FiniteComplexObject, loss: LossMatrix,
                          signals: Sequence[int]) -> Strategy:
    """Optimal strategy for argmax_theta sum_i log sum_y p(x_i, y; theta)."""
    return optimal_strategy(obj, loss, ml_unsupervised_estimate(obj, signals))


def ml_source_procedure(obj: FiniteComplexObject, loss: LossMatrix,
                        source: LearningSource) -> TableProcedure:
    """g(z) = optimal strategy at argmax_theta p(z; theta); ties to the lowest model.

    Outcomes impossible under every model get model 0; they carry no mass.
    """
    if source.outcome_count == 1:
        raise ConfigurationError(
            "maximum-likelihood learning needs data; the source carries no information"
        )
    prob = source.prob
    # ties within rounding go to the lowest model index
    best = np.argmax(prob >= prob.max(axis=1, keepdims=True) * (1 - 1e-12), axis=1)
    opt = np.stack([optimal_strategy(obj, loss, t).decisions for t in range(obj.model_count)])
    return TableProcedure(decisions=opt[best], state_count=obj.state_count)

"""Finite complex objects, strategies, losses and their risks.

A complex object is a probability tensor ``p[x, y, theta]``: for each model
``theta`` the slice ``p[:, :, theta]`` is a joint distribution over signals
and hidden states. Strategies are row-stochastic matrices ``q[x, y']``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

NORM_TOL = 1e-9


class ConfigurationError(ValueError):
    """Raised when inputs have inconsistent shapes or violate invariants."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _labels(labels, size: int, axis: str):
    if labels is None:
        return None
    labels = tuple(str(s) for s in labels)
    if len(labels) != size:
        raise ConfigurationError(f"{axis} labels: expected {size}, got {len(labels)}")
    return labels


@dataclass(frozen=True, eq=False)
class FiniteComplexObject:
    """The quadruple <X, Y, Theta, p(x, y; theta)> with finite axes."""

    joint: np.ndarray
    signal_labels: tuple[str, ...] | None = None
    state_labels: tuple[str, ...] | None = None
    model_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        p = _frozen(self.joint)
        if p.ndim != 3 or 0 in p.shape:
            raise ConfigurationError(f"joint must be a non-empty 3-tensor, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or p.min() < 0:
            raise ConfigurationError("joint probabilities must be finite and non-negative")
        totals = p.sum(axis=(0, 1))
        bad = np.flatnonzero(np.abs(totals - 1.0) > NORM_TOL)
        if bad.size:
            raise ConfigurationError(
                f"model {int(bad[0])} sums to {totals[bad[0]]!r}, not 1 (tolerance {NORM_TOL})"
            )
        object.__setattr__(self, "joint", p)
        object.__setattr__(self, "signal_labels", _labels(self.signal_labels, p.shape[0], "signal"))
        object.__setattr__(self, "state_labels", _labels(self.state_labels, p.shape[1], "state"))
        object.__setattr__(self, "model_labels", _labels(self.model_labels, p.shape[2], "model"))

    @property
    def signal_count(self) -> int:
        return self.joint.shape[0]

    @property
    def state_count(self) -> int:
        return self.joint.shape[1]

    @property
    def model_count(self) -> int:
        return self.joint.shape[2]

    def signal_marginal(self) -> np.ndarray:
        """p(x; theta) as an array of shape (X, Theta)."""
        return self.joint.sum(axis=1)

    def state_marginal(self) -> np.ndarray:
        """p(y; theta) as an array of shape (Y, Theta)."""
        return self.joint.sum(axis=0)


@dataclass(frozen=True, eq=False)
class LossMatrix:
    """w[y, y']: loss of deciding y' when the true state is y."""

    w: np.ndarray

    def __post_init__(self):
        w = _frozen(self.w)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
            raise ConfigurationError(f"loss must be a non-empty square matrix, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ConfigurationError("loss entries must be finite")
        object.__setattr__(self, "w", w)

    @classmethod
    def zero_one(cls, state_count: int) -> "LossMatrix":
        return cls(1.0 - np.eye(state_count))

    @property
    def size(self) -> int:
        return self.w.shape[0]

    def is_zero_one(self) -> bool:
        return bool(np.array_equal(self.w, 1.0 - np.eye(self.size)))


@dataclass(frozen=True, eq=False)
class Strategy:
    """Randomized strategy q[x, y'] = probability of deciding y' on signal x."""

    q: np.ndarray

    def __post_init__(self):
        q = _frozen(self.q)
        if q.ndim != 2 or 0 in q.shape:
            raise ConfigurationError(f"strategy must be a non-empty matrix, got {q.shape}")
        if not np.all(np.isfinite(q)) or q.min() < 0:
            raise ConfigurationError("strategy entries must be finite and non-negative")
        if np.max(np.abs(q.sum(axis=1) - 1.0)) > NORM_TOL:
            raise ConfigurationError("every strategy row must sum to 1")
        object.__setattr__(self, "q", q)

    @classmethod
    def deterministic(cls, decisions: Sequence[int], state_count: int) -> "Strategy":
        d = np.asarray(decisions, dtype=int)
        if d.ndim != 1 or d.size == 0 or d.min() < 0 or d.max() >= state_count:
            raise ConfigurationError("decisions must be state indices")
        q = np.zeros((d.size, state_count))
        q[np.arange(d.size), d] = 1.0
        return cls(q)

    @classmethod
    def uniform(cls, signal_count: int, state_count: int) -> "Strategy":
        return cls(np.full((signal_count, state_count), 1.0 / state_count))

    @property
    def signal_count(self) -> int:
        return self.q.shape[0]

    @property
    def state_count(self) -> int:
        return self.q.shape[1]

    def is_deterministic(self) -> bool:
        return bool(np.all((self.q == 0.0) | (self.q == 1.0)))

    @property
    def decisions(self) -> np.ndarray:
        """Most probable decision per signal (the decision itself if deterministic)."""
        return np.argmax(self.q, axis=1)

    def __eq__(self, other):
        if not isinstance(other, Strategy):
            return NotImplemented
        return self.q.shape == other.q.shape and bool(np.array_equal(self.q, other.q))

    def __hash__(self):
        return hash(self.q.tobytes())


def mix(lam: float, a: Strategy, b: Strategy) -> Strategy:
    """Convex combination lam*a + (1-lam)*b."""
    if not 0.0 <= lam <= 1.0:
        raise ConfigurationError("mixing weight must lie in [0, 1]")
    if a.q.shape != b.q.shape:
        raise ConfigurationError("cannot mix strategies of different shapes")
    return Strategy(lam * a.q + (1.0 - lam) * b.q)


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """A point tau on the probability simplex over models."""

    tau: np.ndarray

    def __post_init__(self):
        t = _frozen(self.tau)
        if t.ndim != 1 or t.size == 0:
            raise ConfigurationError("weights must be a non-empty vector")
        if not np.all(np.isfinite(t)) or t.min() < 0 or abs(t.sum() - 1.0) > NORM_TOL:
            raise ConfigurationError("weights must be non-negative and sum to 1")
        object.__setattr__(self, "tau", t)

    @classmethod
    def uniform(cls, model_count: int) -> "WeightFunction":
        return cls(np.full(model_count, 1.0 / model_count))

    @classmethod
    def point_mass(cls, model_count: int, model: int) -> "WeightFunction":
        t = np.zeros(model_count)
        t[model] = 1.0
        return cls(t)

    def __len__(self):
        return self.tau.size


# ---------------------------------------------------------------------------
# risks


def _check(obj: FiniteComplexObject, loss: LossMatrix, strategy: Strategy | None = None,
           model: int | None = None) -> None:
    if loss.size != obj.state_count:
        raise ConfigurationError(
            f"loss is {loss.size}x{loss.size} but the object has {obj.state_count} states"
        )
    if strategy is not None and strategy.q.shape != (obj.signal_count, obj.state_count):
        raise ConfigurationError(
            f"strategy shape {strategy.q.shape} does not match object "
            f"({obj.signal_count}, {obj.state_count})"
        )
    if model is not None and not 0 <= model < obj.model_count:
        raise ConfigurationError(f"model index {model} out of range [0, {obj.model_count})")


def decision_costs(obj: FiniteComplexObject, loss: LossMatrix) -> np.ndarray:
    """c[x, y', theta] = sum_y p(x, y; theta) * w(y, y')."""
    _check(obj, loss)
    return np.einsum("xyt,yd->xdt", obj.joint, loss.w)


def risks(obj: FiniteComplexObject, loss: LossMatrix, strategy: Strategy) -> np.ndarray:
    """Risk of ``strategy`` under every model, shape (Theta,)."""
    _check(obj, loss, strategy)
    return np.einsum("xd,xdt->t", strategy.q, decision_costs(obj, loss))


def risk(obj: FiniteComplexObject, loss: LossMatrix, strategy: Strategy, model: int) -> float:
    _check(obj, loss, strategy, model)
    costs = np.einsum("xy,yd->xd", obj.joint[:, :, model], loss.w)
    return float(np.sum(strategy.q * costs))


def _argmin_rows(scores: np.ndarray) -> np.ndarray:
    # np.argmin returns the first minimum, i.e. the lowest state index on ties
    return np.argmin(scores, axis=-1)


def optimal_decisions(obj: FiniteComplexObject, loss: LossMatrix) -> np.ndarray:
    """Optimal decision per (signal, model), shape (X, Theta)."""
    return _argmin_rows(np.moveaxis(decision_costs(obj, loss), 1, 2))


def optimal_strategy(obj: FiniteComplexObject, loss: LossMatrix, model: int) -> Strategy:
    _check(obj, loss, model=model)
    costs = obj.joint[:, :, model] @ loss.w
    return Strategy.deterministic(_argmin_rows(costs), obj.state_count)


def optimal_risks(obj: FiniteComplexObject, loss: LossMatrix) -> np.ndarray:
    """min_q R(q, theta) for every model, shape (Theta,)."""
    return decision_costs(obj, loss).min(axis=1).sum(axis=0)


def optimal_risk(obj: FiniteComplexObject, loss: LossMatrix, model: int) -> float:
    _check(obj, loss, model=model)
    return risk(obj, loss, optimal_strategy(obj, loss, model), model)


def _weights_array(weights, model_count: int) -> np.ndarray:
    tau = weights.tau if isinstance(weights, WeightFunction) else np.asarray(weights, dtype=float)
    if tau.shape != (model_count,):
        raise ConfigurationError(f"expected {model_count} weights, got shape {tau.shape}")
    if not np.all(np.isfinite(tau)) or tau.min() < 0 or tau.sum() <= 0:
        raise ConfigurationError("weights must be non-negative with a positive sum")
    return tau


def bayes_strategy(obj: FiniteComplexObject, loss: LossMatrix, weights,
                   fast_zero_one: bool = False) -> Strategy:
    """Deterministic Bayesian strategy for the (possibly unnormalized) weights.

    Decides ``argmin_{y'} sum_y [sum_theta tau(theta) p(x, y; theta)] w(y, y')``.
    With ``fast_zero_one`` and a 0-1 loss this is the equivalent
    ``argmax_y sum_theta tau(theta) p(x, y; theta)``.
    """
    _check(obj, loss)
    tau = _weights_array(weights, obj.model_count)
    mixture = obj.joint @ tau
    if fast_zero_one and loss.is_zero_one():
        return Strategy.deterministic(np.argmax(mixture, axis=1), obj.state_count)
    return Strategy.deterministic(_argmin_rows(mixture @ loss.w), obj.state_count)


def regret(obj: FiniteComplexObject, loss: LossMatrix, strategy: Strategy, model: int) -> float:
    return risk(obj, loss, strategy, model) - optimal_risk(obj, loss, model)


def regrets(obj: FiniteComplexObject, loss: LossMatrix, strategy: Strategy) -> np.ndarray:
    return risks(obj, loss, strategy) - optimal_risks(obj, loss)


def predominates(obj: FiniteComplexObject, loss: LossMatrix, a: Strategy, b: Strategy) -> bool:
    """True iff ``a`` has strictly lower risk than ``b`` under every model."""
    return bool(np.all(risks(obj, loss, a) < risks(obj, loss, b)))


def joint_max_strategy(obj: FiniteComplexObject) -> Strategy:
    """The common maximum-likelihood rule argmax_y max_theta p(x, y; theta)."""
    return Strategy.deterministic(np.argmax(obj.joint.max(axis=2), axis=1), obj.state_count)

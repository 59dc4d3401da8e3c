"""Brute-force references for tiny instances.

Nothing here calls the Bayes rule or the projection loop it is meant to
check; strategies are enumerated and risks summed directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigurationError,
    FiniteComplexObject,
    LossMatrix,
    Strategy,
    WeightFunction,
)
from .learning import LearningSource

MAX_TINY = 4
MAX_TINY_OUTCOMES = 8
ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class TinyInstance:
    object: FiniteComplexObject
    loss: LossMatrix
    source: LearningSource | None = None

    def __post_init__(self):
        o = self.object
        if max(o.signal_count, o.state_count, o.model_count) > MAX_TINY:
            raise ConfigurationError(f"tiny instances need |X|, |Y|, |Theta| <= {MAX_TINY}")
        if self.loss.size != o.state_count:
            raise ConfigurationError("loss does not match the object's states")
        if self.source is not None:
            if self.source.outcome_count > MAX_TINY_OUTCOMES:
                raise ConfigurationError(f"tiny sources need |Z| <= {MAX_TINY_OUTCOMES}")
            if self.source.model_count != o.model_count:
                raise ConfigurationError("source does not match the object's models")

    @classmethod
    def random(cls, rng: np.random.Generator, signals: int = 2, states: int = 2,
               models: int = 2, outcomes: int | None = None,
               zero_one: bool = True) -> "TinyInstance":
        joint = rng.random((signals, states, models)) + 1e-3
        joint /= joint.sum(axis=(0, 1), keepdims=True)
        w = 1.0 - np.eye(states) if zero_one else rng.random((states, states))
        source = None
        if outcomes is not None:
            p = rng.random((outcomes, models)) + 1e-3
            source = LearningSource(p / p.sum(axis=0, keepdims=True))
        return cls(FiniteComplexObject(joint), LossMatrix(w), source)


def sort_projection(v) -> WeightFunction:
    """Exact simplex projection by sorted thresholding."""
    v = np.asarray(v, dtype=float).ravel()
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.count_nonzero(u - css / ind > 0)
    lam = css[rho - 1] / rho
    w = np.maximum(v - lam, 0.0)
    return WeightFunction(w / w.sum())


def _shape(instance) -> tuple[int, int]:
    if isinstance(instance, TinyInstance):
        return instance.object.signal_count, instance.object.state_count
    return tuple(instance)


def enumerate_deterministic_strategies(instance) -> list[Strategy]:
    """All |Y|^|X| deterministic strategies, lexicographic in the decision vector.

    ``instance`` is a TinyInstance or a (signal_count, state_count) pair.
    """
    x, y = _shape(instance)
    if y ** x > ENUMERATION_LIMIT:
        raise ConfigurationError(f"{y}^{x} strategies exceed the enumeration limit")
    return [Strategy.deterministic(d, y) for d in itertools.product(range(y), repeat=x)]


def _all_decisions(x: int, y: int) -> np.ndarray:
    if y ** x > ENUMERATION_LIMIT:
        raise ConfigurationError(f"{y}^{x} strategies exceed the enumeration limit")
    return np.array(list(itertools.product(range(y), repeat=x)), dtype=int).reshape(-1, x)


def risk_by_sum(obj: FiniteComplexObject, loss: LossMatrix, strategy: Strategy, model: int) -> float:
    """Literal triple sum over x, y', y."""
    total = 0.0
    for x in range(obj.signal_count):
        for d in range(obj.state_count):
            for y in range(obj.state_count):
                total += strategy.q[x, d] * obj.joint[x, y, model] * loss.w[y, d]
    return total


def _per_decision_losses(obj: FiniteComplexObject, loss: LossMatrix) -> list[np.ndarray]:
    """For each x, the (Y', Theta) table sum_y p(x, y; theta) w(y, y')."""
    return [np.array([[sum(obj.joint[x, y, t] * loss.w[y, d] for y in range(obj.state_count))
                       for t in range(obj.model_count)]
                      for d in range(obj.state_count)])
            for x in range(obj.signal_count)]


def deterministic_risk_table(obj: FiniteComplexObject, loss: LossMatrix) -> np.ndarray:
    """Risk of every enumerated deterministic strategy under every model, (S, Theta)."""
    decisions = _all_decisions(obj.signal_count, obj.state_count)
    table = np.zeros((decisions.shape[0], obj.model_count))
    for x, per_decision in enumerate(_per_decision_losses(obj, loss)):
        table += per_decision[decisions[:, x]]
    return table


def strategy_risks(obj: FiniteComplexObject, loss: LossMatrix, strategy: Strategy) -> np.ndarray:
    """Risks accumulated in the same order as deterministic_risk_table, so ties stay exact."""
    out = np.zeros(obj.model_count)
    for x, per_decision in enumerate(_per_decision_losses(obj, loss)):
        out += strategy.q[x] @ per_decision
    return out


def brute_force_optimal(obj: FiniteComplexObject, loss: LossMatrix, model: int) -> tuple[Strategy, float]:
    """Minimum-risk deterministic strategy by enumeration (first in enumeration order)."""
    table = deterministic_risk_table(obj, loss)
    best = int(np.argmin(table[:, model]))
    decisions = _all_decisions(obj.signal_count, obj.state_count)[best]
    return Strategy.deterministic(decisions, obj.state_count), float(table[best, model])


def brute_force_bayes_value(obj: FiniteComplexObject, loss: LossMatrix, tau) -> float:
    """min over deterministic strategies of sum_theta tau(theta) R(q, theta)."""
    return float((deterministic_risk_table(obj, loss) @ np.asarray(tau, float)).min())


def domination_search(instance, target: Strategy, grid_points: int = 201) -> Strategy | None:
    """A deterministic strategy with strictly lower risk than ``target`` under every model.

    ``instance`` is a TinyInstance or an (object, loss) pair. Small instances are
    enumerated exhaustively. Larger ones (|Theta| <= 3) scan the vertex strategies
    picked out by a uniform weight grid: per signal, the decision minimizing the
    weighted cost. Any hit is a genuine predominator; a miss there is not a proof.
    """
    obj, loss = (instance.object, instance.loss) if isinstance(instance, TinyInstance) else instance
    if obj.state_count ** obj.signal_count <= ENUMERATION_LIMIT:
        table = deterministic_risk_table(obj, loss)
        target_risks = strategy_risks(obj, loss, target)
        hits = np.flatnonzero(np.all(table < target_risks[None, :], axis=1))
        if hits.size == 0:
            return None
        decisions = _all_decisions(obj.signal_count, obj.state_count)[hits[0]]
        return Strategy.deterministic(decisions, obj.state_count)
    if obj.model_count > 3:
        raise ConfigurationError("vertex scan needs |Theta| <= 3")
    # cost[x, d, t] = sum_y p(x, y; t) w(y, d)
    cost = np.stack([obj.joint[:, :, t] @ loss.w for t in range(obj.model_count)], axis=2)
    target_risks = np.einsum("xd,xdt->t", target.q, cost)
    rows = np.arange(obj.signal_count)
    for tau in simplex_grid(obj.model_count, grid_points):
        d = np.argmin(cost @ tau, axis=1)
        r = cost[rows, d].sum(axis=0)
        if np.all(r < target_risks):
            return Strategy.deterministic(d, obj.state_count)
    return None


def exhaustive_ml(obj: FiniteComplexObject, sample, supervised: bool = True) -> tuple[int, np.ndarray]:
    """Likelihood of the sample under each model by direct products; (argmax, table)."""
    like = np.ones(obj.model_count)
    for t in range(obj.model_count):
        for item in sample:
            if supervised:
                x, y = item
                like[t] *= obj.joint[x, y, t]
            else:
                like[t] *= sum(obj.joint[item, y, t] for y in range(obj.state_count))
    best = max(range(obj.model_count), key=lambda t: (like[t], -t))
    return best, like


def brute_force_phi(instance: TinyInstance, tau, offset: np.ndarray | None = None) -> float:
    """phi(tau) by enumerating a deterministic strategy per outcome.

    The inner minimum over procedures separates over outcomes z.
    """
    obj, loss = instance.object, instance.loss
    table = deterministic_risk_table(obj, loss)
    opt = table.min(axis=0) if offset is None else offset
    src = instance.source.prob if instance.source is not None else np.ones((1, obj.model_count))
    tau = np.asarray(tau, dtype=float)
    inner = sum(float((table @ (tau * src[z])).min()) for z in range(src.shape[0]))
    return inner - float(tau @ opt)


def simplex_grid(models: int, grid_points: int) -> np.ndarray:
    """Uniform grid on the simplex with spacing 1 / (grid_points - 1)."""
    steps = grid_points - 1
    pts = [c for c in itertools.product(range(steps + 1), repeat=models - 1) if sum(c) <= steps]
    arr = np.array(pts, dtype=float).reshape(-1, models - 1)
    return np.hstack([arr, steps - arr.sum(axis=1, keepdims=True)]) / steps


def grid_dual_value(instance: TinyInstance, grid_points: int = 201, minimax: bool = False) -> float:
    """max of phi over a uniform weight grid; a lower bound on the minimax-regret value."""
    obj, loss = instance.object, instance.loss
    if obj.model_count > 3:
        raise ConfigurationError("dense weight grids need |Theta| <= 3")
    if obj.model_count == 1:
        return brute_force_phi(instance, [1.0], np.zeros(1) if minimax else None)
    table = deterministic_risk_table(obj, loss)
    opt = np.zeros(obj.model_count) if minimax else table.min(axis=0)
    src = instance.source.prob if instance.source is not None else np.ones((1, obj.model_count))
    taus = simplex_grid(obj.model_count, grid_points)
    inner = np.zeros(taus.shape[0])
    for z in range(src.shape[0]):
        inner += ((taus * src[z]) @ table.T).min(axis=1)
    return float((inner - taus @ opt).max())

"""Supergradient ascent on the model weights for minimax-regret learning.

For weights tau the Bayesian procedure g_tau minimizes sum_theta tau R_Z(g, theta).
The dual function

    phi(tau) = sum_theta tau(theta) [R_Z(g_tau, theta) - offset(theta)]

is concave with supergradient delta(theta) = R_Z(g_tau, theta) - offset(theta).
With offset = optimal risks this yields the closest-to-optimal procedure;
with offset = 0 the minimax procedure.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import ConfigurationError, FiniteComplexObject, LossMatrix, WeightFunction
from .learning import BayesProcedure, LearningProblem, LearningSource

# rounds of the clip-and-recentre loop before the closed-form finish
PROJECTION_ROUNDS = 200


def project_to_simplex(v, tolerance: float = 1e-12) -> WeightFunction:
    """Euclidean projection of ``v`` onto the probability simplex.

    Runs the clip-and-recentre iteration until no coordinate is below
    ``-tolerance`` (or for PROJECTION_ROUNDS rounds), then finishes exactly:
    every coordinate still positive equals v_i minus a common shift, so the
    shift is solved for on that support, dropping coordinates it pushes
    below zero, until the support is stable.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ConfigurationError("projection needs a non-empty finite vector")
    k = v.size
    t = v.copy()
    for _ in range(PROJECTION_ROUNDS):
        t -= (t.sum() - 1.0) / k
        if t.min() >= -tolerance:
            break
        np.maximum(t, 0.0, out=t)
    support = t > 0
    if not support.any():
        support[np.argmax(v)] = True
    while True:
        shift = (v[support].sum() - 1.0) / support.sum()
        keep = support & (v - shift > 0)
        if keep.sum() == support.sum() or not keep.any():
            break
        support = keep
    out = np.where(support, v - shift, 0.0)
    out = np.maximum(out, 0.0)
    out /= out.sum()
    return WeightFunction(out)


def sqrt_schedule(gamma0: float) -> Callable[[int], float]:
    return lambda i: gamma0 / math.sqrt(i)


def harmonic_schedule(gamma0: float) -> Callable[[int], float]:
    return lambda i: gamma0 / i


SCHEDULES = {"sqrt": sqrt_schedule, "harmonic": harmonic_schedule}


@dataclass
class SolverConfig:
    """Inputs of the ascent.

    ``step_schedule`` maps the iteration number i >= 1 to gamma_i; it may be a
    name from SCHEDULES, in which case gamma_0 is ``step_scale`` or, when that
    is None, 1 / (1 + max_theta delta(theta)) at the initial weights.
    """

    epsilon: float = 0.01
    step_schedule: str | Callable[[int], float] = "sqrt"
    step_scale: float | None = None
    max_iterations: int = 5000
    initial_weights: WeightFunction | None = None
    projection_tolerance: float = 1e-12

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be positive")
        if isinstance(self.step_schedule, str) and self.step_schedule not in SCHEDULES:
            raise ConfigurationError(f"unknown step schedule {self.step_schedule!r}")
        if self.step_scale is not None and not self.step_scale > 0:
            raise ConfigurationError("step_scale must be positive")


@dataclass
class TraceRecord:
    iteration: int
    weights: np.ndarray
    deltas: np.ndarray
    max_delta: float
    dual: float
    upper: float
    lower: float

    @property
    def gap(self) -> float:
        return self.upper - self.lower


@dataclass
class SolverResult:
    """Best procedure (attaining ``upper``) and best weights (attaining ``lower``)."""

    procedure: BayesProcedure
    weights: WeightFunction
    upper: float
    lower: float
    trace: list[TraceRecord] = field(repr=False)
    converged: bool
    procedure_deltas: np.ndarray = field(repr=False, default=None)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def status(self) -> str:
        return "converged" if self.converged else "unconverged"

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _deltas(problem: LearningProblem, tau: np.ndarray, offset: np.ndarray):
    proc = BayesProcedure(problem, tau)
    expected = problem.expected_risks_of_decisions(proc.decision_table())
    return proc, expected - offset


def phi(obj: FiniteComplexObject, loss: LossMatrix, source: LearningSource, weights) -> float:
    """Concave dual: tau-weighted regret of the Bayesian procedure for tau."""
    problem = LearningProblem(obj, loss, source)
    tau = weights.tau if isinstance(weights, WeightFunction) else np.asarray(weights, float)
    _, d = _deltas(problem, tau, problem.optimal_risks)
    return float(tau @ d)


def supergradient(obj: FiniteComplexObject, loss: LossMatrix, source: LearningSource,
                  weights) -> np.ndarray:
    """delta(theta) = R_Z(g_tau, theta) - min_q R_X(q, theta)."""
    problem = LearningProblem(obj, loss, source)
    tau = weights.tau if isinstance(weights, WeightFunction) else np.asarray(weights, float)
    return _deltas(problem, tau, problem.optimal_risks)[1]


def _ascend(problem: LearningProblem, offset: np.ndarray, config: SolverConfig) -> SolverResult:
    models = problem.object.model_count
    tau = (config.initial_weights.tau if config.initial_weights is not None
           else np.full(models, 1.0 / models)).copy()
    if tau.size != models:
        raise ConfigurationError("initial weights do not match the number of models")
    upper, lower = math.inf, -math.inf
    best_proc = best_tau = best_deltas = None
    schedule = None
    trace: list[TraceRecord] = []
    converged = False
    for i in range(1, config.max_iterations + 1):
        proc, deltas = _deltas(problem, tau, offset)
        max_delta = float(deltas.max())
        dual = float(tau @ deltas)
        if max_delta < upper:
            upper, best_proc, best_deltas = max_delta, proc, deltas
        if dual > lower:
            lower, best_tau = dual, tau.copy()
        trace.append(TraceRecord(i, tau.copy(), deltas, max_delta, dual, upper, lower))
        if upper - lower < config.epsilon:
            converged = True
            break
        if schedule is None:
            if callable(config.step_schedule):
                schedule = config.step_schedule
            else:
                gamma0 = config.step_scale or 1.0 / (1.0 + max(max_delta, 0.0))
                schedule = SCHEDULES[config.step_schedule](gamma0)
        tau = project_to_simplex(tau + schedule(i) * deltas, config.projection_tolerance).tau
    return SolverResult(best_proc, WeightFunction(best_tau), upper, lower, trace, converged,
                        best_deltas)


def solve_closest_to_optimal(obj: FiniteComplexObject, loss: LossMatrix, source: LearningSource,
                             config: SolverConfig | None = None) -> SolverResult:
    """Procedure minimizing max_theta [R_Z(g, theta) - min_q R_X(q, theta)] to within epsilon."""
    problem = LearningProblem(obj, loss, source)
    return _ascend(problem, problem.optimal_risks, config or SolverConfig())


def solve_minimax(obj: FiniteComplexObject, loss: LossMatrix, source: LearningSource,
                  config: SolverConfig | None = None) -> SolverResult:
    """Procedure minimizing max_theta R_Z(g, theta) to within epsilon."""
    problem = LearningProblem(obj, loss, source)
    return _ascend(problem, np.zeros(obj.model_count), config or SolverConfig())


def trace_to_csv(result: SolverResult, include_weights: bool = False) -> str:
    """Trace as CSV text: iteration, S, s, gap, max-regret and optionally tau."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["iteration", "S", "s", "gap", "max_regret"]
    if include_weights and result.trace:
        header += [f"tau_{j}" for j in range(result.trace[0].weights.size)]
    writer.writerow(header)
    for rec in result.trace:
        row = [rec.iteration, f"{rec.upper:.12g}", f"{rec.lower:.12g}", f"{rec.gap:.12g}",
               f"{rec.max_delta:.12g}"]
        if include_weights:
            row += [f"{w:.12g}" for w in rec.weights]
        writer.writerow(row)
    return buf.getvalue()

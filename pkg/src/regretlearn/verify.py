"""Oracle-backed property suites, runnable from the command line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import LossMatrix, Strategy, WeightFunction, bayes_strategy, risks
from .learning import (
    LearningProblem,
    TableProcedure,
    supervised_source,
)
from .oracles import TinyInstance, deterministic_risk_table, domination_search, sort_projection
from .solver import phi, project_to_simplex, supergradient

SUITES = ("projection", "concavity", "bayes", "compression")


@dataclass
class SuiteReport:
    name: str
    checks: int = 0
    worst: float = 0.0
    tolerance: float = 0.0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, deviation: float, replay: dict | None = None,
               violated: bool | None = None) -> None:
        """``violated`` overrides the plain tolerance test when a check has several bounds."""
        self.checks += 1
        self.worst = max(self.worst, deviation)
        if violated is None:
            violated = deviation > self.tolerance
        if violated:
            self.violations.append(replay if replay is not None else {})

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.name}: {self.checks} checks, worst deviation "
                f"{self.worst:.3g} (tolerance {self.tolerance:g}), {len(self.violations)} violations")


def _tolist(a):
    return np.asarray(a).tolist()


def projection_suite(rng: np.random.Generator, count: int = 10_000) -> SuiteReport:
    """Simplex membership (sum within 1e-12, no negatives), idempotence and
    agreement with the sort-based oracle within 1e-9."""
    rep = SuiteReport("projection", tolerance=1e-9)
    for _ in range(count):
        dim = int(rng.integers(2, 65))
        v = rng.normal(scale=rng.choice([0.1, 1.0, 10.0]), size=dim)
        p = project_to_simplex(v).tau
        off = abs(p.sum() - 1.0)
        dev = max(off, float(np.abs(p - sort_projection(v).tau).max()),
                  float(np.abs(project_to_simplex(p).tau - p).max()))
        bad = off > 1e-12 or p.min() < 0 or dev > rep.tolerance
        rep.record(dev, {"v": _tolist(v)}, violated=bad)
    return rep


def concavity_suite(rng: np.random.Generator, count: int = 1_000) -> SuiteReport:
    """Concavity of phi and the supergradient inequality on random tiny instances."""
    rep = SuiteReport("concavity", tolerance=1e-9)
    for _ in range(count):
        inst = TinyInstance.random(rng, signals=int(rng.integers(1, 5)), states=int(rng.integers(2, 5)),
                                   models=int(rng.integers(2, 5)), outcomes=int(rng.integers(1, 5)),
                                   zero_one=bool(rng.integers(2)))
        obj, loss, src = inst.object, inst.loss, inst.source
        t1 = rng.dirichlet(np.ones(obj.model_count))
        t2 = rng.dirichlet(np.ones(obj.model_count))
        lam = float(rng.random())
        f1, f2 = phi(obj, loss, src, t1), phi(obj, loss, src, t2)
        fm = phi(obj, loss, src, lam * t1 + (1 - lam) * t2)
        g1 = supergradient(obj, loss, src, t1)
        dev = max(lam * f1 + (1 - lam) * f2 - fm, f2 - f1 - float(g1 @ (t2 - t1)), 0.0)
        rep.record(dev, {"joint": _tolist(obj.joint), "loss": _tolist(loss.w),
                         "source": _tolist(src.prob), "tau1": _tolist(t1), "tau2": _tolist(t2),
                         "lambda": lam})
    return rep


def bayes_suite(rng: np.random.Generator, count: int = 1_000) -> SuiteReport:
    """Bayes strategies minimize the weighted risk and are never predominated."""
    rep = SuiteReport("bayes", tolerance=1e-9)
    for _ in range(count):
        inst = TinyInstance.random(rng, signals=int(rng.integers(1, 5)), states=int(rng.integers(2, 5)),
                                   models=int(rng.integers(1, 5)), zero_one=bool(rng.integers(2)))
        obj, loss = inst.object, inst.loss
        tau = rng.dirichlet(np.ones(obj.model_count))
        b = bayes_strategy(obj, loss, tau)
        best = float((deterministic_risk_table(obj, loss) @ tau).min())
        gap = float(risks(obj, loss, b) @ tau) - best
        dominated = domination_search(inst, b) is not None
        dev = max(gap, 0.0) + (1.0 if dominated else 0.0)
        rep.record(dev, {"joint": _tolist(obj.joint), "loss": _tolist(loss.w), "tau": _tolist(tau)})
    return rep


def lift_to_sequences(compressed, sequences) -> np.ndarray:
    """Index of the multiset outcome behind every ordered-sample outcome."""
    index = {s: z for z, s in enumerate(compressed.samples)}
    return np.array([index[tuple(sorted(s))] for s in sequences.samples])


def compression_suite(rng: np.random.Generator, objects: int = 50) -> SuiteReport:
    """Multiset and ordered supervised sources give equal expected risks for n <= 2."""
    rep = SuiteReport("compression", tolerance=1e-9)
    loss = LossMatrix.zero_one(2)
    for _ in range(objects):
        obj = TinyInstance.random(rng, 2, 2, int(rng.integers(1, 4))).object
        for n in (0, 1, 2):
            small = supervised_source(obj, n, compressed=True)
            big = supervised_source(obj, n, compressed=False)
            lift = lift_to_sequences(small, big)
            tables = [LearningProblem(obj, loss, small).bayes_decisions(
                rng.dirichlet(np.ones(obj.model_count)))]
            tables.append(rng.integers(0, 2, size=(small.outcome_count, obj.signal_count)))
            for table in tables:
                a = LearningProblem(obj, loss, small).expected_risks(
                    TableProcedure(decisions=table, state_count=2))
                b = LearningProblem(obj, loss, big).expected_risks(
                    TableProcedure(decisions=table[lift], state_count=2))
                rep.record(float(np.abs(a - b).max()),
                           {"joint": _tolist(obj.joint), "n": n, "table": _tolist(table)})
    return rep


_RUNNERS = {
    "projection": projection_suite,
    "concavity": concavity_suite,
    "bayes": bayes_suite,
    "compression": compression_suite,
}


def run_suites(name: str, seed: int = 0, scale: float = 1.0) -> list[SuiteReport]:
    """Run one suite or ``all``; ``scale`` shrinks the trial counts."""
    if name == "all":
        names = list(SUITES)
    elif name in _RUNNERS:
        names = [name]
    else:
        raise KeyError(name)
    rng = np.random.default_rng(seed)
    reports = []
    defaults = {"projection": 10_000, "concavity": 1_000, "bayes": 1_000, "compression": 50}
    for n in names:
        reports.append(_RUNNERS[n](rng, max(1, int(defaults[n] * scale))))
    return reports


def violations_json(reports: list[SuiteReport]) -> str:
    return json.dumps({r.name: r.violations for r in reports if r.violations}, indent=1)

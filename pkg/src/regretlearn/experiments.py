"""The four Gaussian learning experiments and the figure-data pipeline.

1. Robbins object, learning from a sample of states.
2. Robbins object, learning from unlabelled signals.
3. Two-mean object, learning from signals drawn in state 2.
4. Two-mean object, learning from unlabelled signals.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import ConfigurationError, LossMatrix
from .gaussian import (
    GaussianExampleSpec,
    GaussianProblem,
    Grid1D,
    discretize,
    heuristic_procedure,
    DEFAULT_GRIDS,
)
from .learning import (
    DEFAULT_OUTCOME_BUDGET,
    LearningProblem,
    LearningSource,
    Quantizer,
    quantized_signal_source,
    state_sample_source,
)
from .solver import SolverConfig, solve_closest_to_optimal, solve_minimax, trace_to_csv

__version__ = "0.1.0"

EXAMPLES = (1, 2, 3, 4)
PROCEDURES = ("closest-to-optimal", "ml", "robbins", "consistent", "minimax")
ALIASES = {"closest": "closest-to-optimal", "g0": "closest-to-optimal"}
SOLVED = ("closest-to-optimal", "minimax")

# heuristic kind behind each estimate-based procedure, per example
HEURISTIC_KINDS = {
    1: {"ml": "ml-supervised"},
    2: {"ml": "ml-unsupervised", "robbins": "robbins", "consistent": "consistent"},
    3: {"ml": "ml-supervised"},
    4: {"ml": "ml-unsupervised", "consistent": "consistent"},
}

# quantizer ranges (lower, upper, width) for signal-sample sources
QUANTIZERS = {
    "robbins": (-4.0, 4.0, 0.5),
    "two-mean": (-8.0, 8.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class ExampleSetup:
    example: int
    n: int
    problem: GaussianProblem
    loss: LossMatrix
    source: LearningSource
    quantizer: Quantizer | None = None

    @property
    def object(self):
        return self.problem.object


def build_example(example: int, n: int, grid_step: float | None = None,
                  theta_step: float | None = None, quantizer_width: float | None = None,
                  budget: int = DEFAULT_OUTCOME_BUDGET) -> ExampleSetup:
    if example not in EXAMPLES:
        raise ConfigurationError(f"unknown example {example!r}; choose from {EXAMPLES}")
    if example in (1, 2):
        spec = GaussianExampleSpec.robbins(theta_step or 0.05)
    else:
        spec = GaussianExampleSpec.two_mean(theta_step or 0.2)
    grid = DEFAULT_GRIDS[spec.variant]
    if grid_step is not None:
        grid = Grid1D(grid.lower, grid.upper, grid_step)
    problem = discretize(spec, grid)
    loss = LossMatrix.zero_one(2)
    quantizer = None
    if example == 1:
        source = state_sample_source(problem.object, n, budget=budget)
    else:
        lo, hi, width = QUANTIZERS[spec.variant]
        quantizer = Quantizer.uniform(problem.signal_values, lo, hi, quantizer_width or width)
        state = 1 if example == 3 else None
        source = quantized_signal_source(problem.object, n, quantizer, state=state, budget=budget)
    return ExampleSetup(example, n, problem, loss, source, quantizer)


@dataclass
class ExperimentConfig:
    example: int = 1
    n: list = field(default_factory=lambda: [0, 1, 2, 4])
    procedures: list = field(default_factory=lambda: ["closest-to-optimal", "ml"])
    epsilon: float = 0.01
    grid_step: float | None = None
    theta_step: float | None = None
    quantizer_width: float | None = None
    schedule: str = "sqrt"
    step_scale: float | None = None
    max_iter: int = 5000
    out: str = "results"
    seed: int | None = None  # reserved; every pipeline is deterministic

    def __post_init__(self):
        if self.example not in EXAMPLES:
            raise ConfigurationError(f"unknown example {self.example!r}")
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")
        self.n = [int(v) for v in self.n]
        if any(v < 0 for v in self.n):
            raise ConfigurationError("sample sizes must be non-negative")
        procs = []
        for p in self.procedures:
            p = ALIASES.get(p, p)
            if p not in PROCEDURES:
                raise ConfigurationError(f"unknown procedure {p!r}; choose from {PROCEDURES}")
            if p not in SOLVED and p not in HEURISTIC_KINDS[self.example]:
                raise ConfigurationError(f"procedure {p!r} is not defined for example {self.example}")
            procs.append(p)
        self.procedures = procs

    def digest(self) -> str:
        """Hash of everything that affects the numbers (the output location does not)."""
        fields = asdict(self)
        fields.pop("out")
        blob = json.dumps(fields, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def cells(self):
        """(procedure, n) pairs to evaluate; n = 0 is skipped for estimate-based procedures."""
        for p in self.procedures:
            for n in self.n:
                if n == 0 and p not in SOLVED:
                    continue
                yield p, n


@dataclass
class CurveResult:
    procedure: str
    n: int
    thetas: np.ndarray
    risks: np.ndarray
    optimal_risks: np.ndarray
    status: str = "exact"
    solver: object = None

    @property
    def regrets(self) -> np.ndarray:
        return self.risks - self.optimal_risks

    @property
    def max_regret(self) -> float:
        return float(self.regrets.max())


def evaluate(setup: ExampleSetup, procedure: str, config: SolverConfig | None = None) -> CurveResult:
    """Risk curve R_Z(g, theta) of one procedure on one example setup."""
    procedure = ALIASES.get(procedure, procedure)
    lp = LearningProblem(setup.object, setup.loss, setup.source)
    opt = lp.optimal_risks
    if procedure in SOLVED:
        solve = solve_closest_to_optimal if procedure == "closest-to-optimal" else solve_minimax
        result = solve(setup.object, setup.loss, setup.source, config)
        r = lp.expected_risks(result.procedure)
        return CurveResult(procedure, setup.n, setup.problem.thetas, r, opt, result.status, result)
    kinds = HEURISTIC_KINDS[setup.example]
    if procedure not in kinds:
        raise ConfigurationError(f"procedure {procedure!r} is not defined for example {setup.example}")
    proc = heuristic_procedure(setup.problem, setup.loss, setup.source, kinds[procedure],
                               setup.quantizer)
    return CurveResult(procedure, setup.n, setup.problem.thetas, lp.expected_risks(proc), opt)


def curve_to_csv(curve: CurveResult, header: str) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "risk", "optimal_risk", "regret", "status"])
    for t, r, o, g in zip(curve.thetas, curve.risks, curve.optimal_risks, curve.regrets):
        w.writerow([f"{t:.12g}", f"{r:.12g}", f"{o:.12g}", f"{g:.12g}", curve.status])
    return buf.getvalue()


PLOT_SCRIPT = '''\
"""Render the risk curves written next to this script (requires matplotlib)."""
import csv
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(path):
    with open(path) as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    return ([float(r["theta"]) for r in rows], [float(r["risk"]) for r in rows],
            [float(r["optimal_risk"]) for r in rows])


sizes = {NS}
fig, axes = plt.subplots(1, len(sizes), figsize=(4 * len(sizes), 3.5), squeeze=False)
for ax, n in zip(axes[0], sizes):
    optimal = None
    for path in sorted(glob.glob(os.path.join(here, f"curve_*_n{n}.csv"))):
        name = os.path.basename(path)[len("curve_"):-len(f"_n{n}.csv")]
        theta, risk, optimal = load(path)
        ax.plot(theta, risk, label=name)
    if optimal is not None:
        ax.plot(theta, optimal, "k-", lw=2, label="optimal")
    ax.set_title(f"example {EXAMPLE}, n = {n}")
    ax.set_xlabel("theta")
    ax.set_ylabel("risk")
    ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(here, "figure.png"), dpi=120)
'''


def run_experiment(config: ExperimentConfig) -> dict:
    """Evaluate every (procedure, n) cell and write CSVs plus a plot script.

    Returns a mapping (procedure, n) -> CurveResult.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    header = f"# regretlearn {__version__} config {config.digest()} example {config.example}"
    solver_config = SolverConfig(epsilon=config.epsilon, step_schedule=config.schedule,
                                 step_scale=config.step_scale, max_iterations=config.max_iter)
    results = {}
    setups = {}
    for proc, n in config.cells():
        if n not in setups:
            setups[n] = build_example(config.example, n, config.grid_step, config.theta_step,
                                      config.quantizer_width)
        curve = evaluate(setups[n], proc, solver_config)
        results[(proc, n)] = curve
        _write(out / f"curve_{proc}_n{n}.csv", curve_to_csv(curve, header))
        if curve.solver is not None:
            _write(out / f"trace_{proc}_n{n}.csv", header + "\n" + trace_to_csv(curve.solver))
    sizes = sorted({n for _, n in results})
    script = PLOT_SCRIPT.replace("{NS}", repr(sizes)).replace("{EXAMPLE}", str(config.example))
    _write(out / "plot.py", script)
    return results


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)

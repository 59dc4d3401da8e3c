"""Minimax-regret decisions and learning for objects with an unknown model from a finite set."""

from .core import (
    ConfigurationError,
    FiniteComplexObject,
    LossMatrix,
    Strategy,
    WeightFunction,
    bayes_strategy,
    joint_max_strategy,
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
from .experiments import ExperimentConfig, __version__, build_example, run_experiment
from .gaussian import GaussianExampleSpec, Grid1D, corner_strategy, discretize
from .learning import (
    BudgetError,
    ImpossibleSampleError,
    LearningProblem,
    LearningSource,
    Quantizer,
    TableProcedure,
    bayes_learning_procedure,
    expected_risk,
    ml_source_procedure,
    ml_supervised_learn,
    ml_unsupervised_learn,
    no_learning_source,
    quantized_signal_source,
    state_sample_source,
    supervised_source,
)
from .solver import (
    SolverConfig,
    SolverResult,
    phi,
    project_to_simplex,
    solve_closest_to_optimal,
    solve_minimax,
    supergradient,
)

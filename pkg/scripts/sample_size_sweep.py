"""Max regret of closest-to-optimal vs maximum-likelihood learning as n grows (example 1)."""

import argparse

from regretlearn.core import LossMatrix
from regretlearn.gaussian import GaussianExampleSpec, discretize
from regretlearn.learning import LearningProblem, ml_source_procedure, state_sample_source
from regretlearn.solver import SolverConfig, solve_closest_to_optimal


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32, 50])
    parser.add_argument("--epsilon", type=float, default=0.01)
    args = parser.parse_args()
    problem = discretize(GaussianExampleSpec.robbins(0.05))
    obj, loss = problem.object, LossMatrix.zero_one(2)
    print("n,closest_to_optimal_S,closest_to_optimal_s,ml_max_regret")
    for n in args.n:
        src = state_sample_source(obj, n)
        lp = LearningProblem(obj, loss, src)
        res = solve_closest_to_optimal(obj, loss, src, SolverConfig(epsilon=args.epsilon))
        ml = (lp.expected_risks(ml_source_procedure(obj, loss, src)) - lp.optimal_risks).max()
        print(f"{n},{res.upper:.5f},{res.lower:.5f},{ml:.5f}")


if __name__ == "__main__":
    main()

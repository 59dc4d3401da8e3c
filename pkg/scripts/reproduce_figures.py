"""Regenerate the risk-curve data for all four experiments.

    python3 scripts/reproduce_figures.py --out results

Each example gets its own directory with curve/trace CSVs and a plot.py that
renders figure.png when matplotlib is installed.
"""

import argparse
import logging

from regretlearn.experiments import ExperimentConfig, run_experiment

# procedures compared per example
PLAN = {
    1: ["closest-to-optimal", "ml", "minimax"],
    2: ["closest-to-optimal", "ml", "robbins", "consistent", "minimax"],
    3: ["closest-to-optimal", "ml", "minimax"],
    4: ["closest-to-optimal", "ml", "consistent", "minimax"],
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results")
    parser.add_argument("--examples", type=int, nargs="+", default=sorted(PLAN))
    parser.add_argument("--n", type=int, nargs="+", default=[0, 1, 2, 4])
    parser.add_argument("--epsilon", type=float, default=0.01)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    log = logging.getLogger("figures")
    for ex in args.examples:
        cfg = ExperimentConfig(example=ex, n=args.n, procedures=PLAN[ex], epsilon=args.epsilon,
                               out=f"{args.out}/example{ex}")
        for (proc, n), curve in run_experiment(cfg).items():
            log.info("example %d  %-18s n=%d  max regret %.4f  [%s]", ex, proc, n, curve.max_regret,
                     curve.status)


if __name__ == "__main__":
    main()

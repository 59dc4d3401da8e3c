"""The two-model 2d example: the likelihood-corner rule is improper.

Prints the risks of the corner rule and of the Bayes rule for equal weights
under both models, and whether the latter predominates the former.
"""

import numpy as np

from regretlearn.core import LossMatrix, bayes_strategy, optimal_risks, predominates, risks
from regretlearn.gaussian import GaussianExampleSpec, corner_strategy, discretize


def main():
    problem = discretize(GaussianExampleSpec.two_model_2d())
    obj, loss = problem.object, LossMatrix.zero_one(2)
    corner = corner_strategy(problem)
    bayes = bayes_strategy(obj, loss, [0.5, 0.5])
    np.set_printoptions(precision=4)
    print("optimal risks       ", optimal_risks(obj, loss))
    print("corner rule risks   ", risks(obj, loss, corner))
    print("equal-weight Bayes  ", risks(obj, loss, bayes))
    print("Bayes predominates corner:", predominates(obj, loss, bayes, corner))


if __name__ == "__main__":
    main()

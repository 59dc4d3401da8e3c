"""Recompute the constants frozen into the test suite from closed forms.

Uses mpmath at 30 digits and nothing from regretlearn, so the frozen numbers
are independent of the code they check.
"""

import mpmath as mp

mp.mp.dps = 30
Phi = mp.ncdf


def robbins_optimal_risk(theta):
    # decide state 1 iff x >= alpha
    theta = mp.mpf(theta)
    if theta in (0, 1):
        return mp.mpf(0)
    alpha = mp.log((1 - theta) / theta) / 2
    return theta * Phi(alpha - 1) + (1 - theta) * (1 - Phi(alpha + 1))


def robbins_threshold_risk(theta, alpha):
    theta = mp.mpf(theta)
    return theta * Phi(alpha - 1) + (1 - theta) * (1 - Phi(alpha + 1))


def main():
    print("Phi(1)                    ", mp.nstr(Phi(1), 16))
    print("Phi(-1)                   ", mp.nstr(Phi(-1), 16))
    print("robbins optimal risk 0.5  ", mp.nstr(robbins_optimal_risk(0.5), 16))
    print("robbins optimal risk 0.25 ", mp.nstr(robbins_optimal_risk(0.25), 16))
    h = Phi(mp.mpf(1) / 2)
    print("2d corner risk            ", mp.nstr((1 - h**2) / 2 + h * (1 - h) / 2, 16))

    # uniform weights on {0, .25, .5, .75, 1}: mixture mean 0.5, Bayes threshold 0
    grid = [0, 0.25, 0.5, 0.75, 1]
    phi = sum(robbins_threshold_risk(t, 0) - robbins_optimal_risk(t) for t in grid) / len(grid)
    print("robbins phi uniform 5-pt  ", mp.nstr(phi, 16))

    # two cells x<0, x>=0 of the Robbins signal at theta = 0.3
    t = mp.mpf("0.3")
    qp = t * (1 - Phi(-1)) + (1 - t) * (1 - Phi(1))
    qm = 1 - qp
    print("robbins cells theta=0.3   ", [mp.nstr(v, 16) for v in (qm**2, 2 * qm * qp, qp**2)])

    # Example 1, n=1, ML: one label pins theta to an endpoint
    worst = max(2 * t * (1 - t) - robbins_optimal_risk(t) for t in [mp.mpf(k) / 20 for k in range(21)])
    print("ex1 ml n=1 max regret     ", mp.nstr(worst, 16))

    print("robbins alpha n=4 sum=2   ", mp.nstr(mp.log(mp.mpf(2) / 6) / 2, 16))


if __name__ == "__main__":
    main()

"""Positive best rank-one term of a positive tensor.

The damped Perron fixed point returns strictly positive vectors whose value
matches the unconstrained best rank-one optimum, so nothing is lost by
insisting on nonnegativity.
"""
import numpy as np

from tenscert.rankone import best_rank_one, kkt_check_rank_one, perron_fixed_point

if __name__ == "__main__":
    T = np.random.default_rng(4).random((3, 3, 3)) + 0.1
    p = perron_fixed_point(T)
    best = best_rank_one(T, restarts=32)
    print(f"Perron value        {p.lam:.15f}")
    print(f"best rank-one value {best.value:.15f}")
    print(f"stationarity        {kkt_check_rank_one(T, p):.2e}")
    for k, u in enumerate(p.vectors):
        print(f"  u{k + 1} = {np.round(u, 6)}")
    print(f"all-ones 2x2x2: {perron_fixed_point(np.ones((2, 2, 2))).lam:.15f} "
          f"vs 2*sqrt(2) = {2 * np.sqrt(2):.15f}")

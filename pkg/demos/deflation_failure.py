"""Sequential rank-one deflation is not optimal for nonnegative rank two.

A positive 2x2x2 tensor of nonnegative rank at least three is drawn. Fitting
one term, subtracting it, clipping and fitting a second term leaves a larger
residual than fitting both terms jointly, and the first term overlaps the
joint solution without matching it.
"""
import numpy as np

from tenscert.nnapprox import compare_deflation, hyperdeterminant, positive_instance

if __name__ == "__main__":
    rng = np.random.default_rng(11)
    T = positive_instance((2, 2, 2), rng)
    print(f"hyperdeterminant {hyperdeterminant(T):.3e} (negative: real rank 3)")
    rep = compare_deflation(T, restarts=64, seed=0)
    for key, value in rep.report().items():
        print(f"  {key:22s} {value}")

"""Nonnegative rank-r fits with verified KKT conditions.

For each r the alternating solver's output is checked against the KKT
conditions of the nonnegative least squares problem. While r is below the
nonnegative rank a positive residual entry is exhibited.
"""
import numpy as np

from tenscert.nnapprox import anls, kkt_verify, residual_positive_witness
from tenscert.tensor import hs_norm

if __name__ == "__main__":
    T = np.random.default_rng(8).random((3, 3, 2))
    for r in (1, 2, 3, 4):
        fit = anls(T, r, restarts=16)
        kkt = kkt_verify(T, fit.factors)
        w = residual_positive_witness(T, fit.factors)
        print(f"r={r}: residual {fit.residual:.6f}, "
              f"KKT violation {kkt.max_equality_violation / hs_norm(T):.1e}, "
              f"positive residual entry {None if w is None else w[0]}")

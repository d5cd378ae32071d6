"""Exact certificate for a unique best rank-one approximation.

Two symmetric 2x2x2 tensors are compared. For the first the eigen
discriminant vanishes and the optimum is attained by two sign classes. For
the second it is nonzero, which proves the optimum is unique.
"""
from fractions import Fraction as F

from tenscert.charpoly import certify_unique, salmon_char_poly
from tenscert.rankone import best_rank_one
from tenscert.tensor import SymTensor


def sym222(a, b, c, d):
    return SymTensor([[[a, b], [b, c]], [[b, c], [c, d]]])


def show(name, S):
    psi = salmon_char_poly(S)
    cert = certify_unique(S)
    best = best_rank_one(S.to_float(), restarts=64)
    print(f"{name}: psi coefficients {[str(c) for c in psi.coeffs]}")
    print(f"  discriminant {cert.discriminant}, verdict {cert.verdict}")
    print(f"  numerical optimum {best.value:.12f} with {best.n_tied} tied class(es)")


if __name__ == "__main__":
    show("diagonal tensor", sym222(F(1), F(0), F(0), F(1)))
    show("generic tensor", sym222(F(2), F(-1, 3), F(1, 2), F(5, 4)))

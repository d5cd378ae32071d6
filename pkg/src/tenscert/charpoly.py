"""E-characteristic polynomial, eigen discriminant and uniqueness certificates
for symmetric 3-tensors on a 2-dimensional space.

For ``S`` in Sym^3(R^2) the characteristic polynomial is
``psi(l) = det(G(l)) / 512`` where ``G`` is the 6x6 Salmon matrix built from
the coefficients of the three ternary quadrics

    F0 = S111 x^2 + 2 S112 xy + S122 y^2 - l xz
    F1 = S112 x^2 + 2 S122 xy + S222 y^2 - l yz
    F2 = x^2 + y^2 - z^2

and of the three partial derivatives of their Jacobian determinant, all in
the monomial basis (x^2, y^2, z^2, xy, xz, yz). ``psi`` is even in ``l`` and
its roots are the normalized eigenvalues of ``S``.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .poly import UniPoly, poly_det, sylvester_matrix, sylvester_resultant
from .tensor import SymTensor, asarray, is_symmetric

__all__ = [
    "salmon_matrix", "salmon_char_poly", "eigen_discriminant", "discriminant_error_bound",
    "certify_unique", "Certificate", "CertificationError",
    "CERTIFIED", "NOT_CERTIFIED", "INDETERMINATE",
]

CERTIFIED = "certified-unique"
NOT_CERTIFIED = "not-certified"
INDETERMINATE = "indeterminate"

PERTURB_SAMPLES = 20
PERTURB_RTOL = 1e-12


class CertificationError(ValueError):
    """Input outside the certified class, or a degenerate characteristic polynomial."""


def _entries(S, exact):
    A = asarray(S)
    if A.shape != (2, 2, 2):
        raise CertificationError(
            f"only order-3 symmetric tensors on R^2 are supported, got shape {A.shape}")
    if not is_symmetric(A):
        raise CertificationError("tensor is not symmetric")
    conv = (lambda x: Fraction(x)) if exact else float
    return tuple(conv(A[idx]) for idx in _ENTRY_INDEX)


def salmon_matrix(t111, t112, t122, t222):
    """Salmon's 6x6 matrix with :class:`UniPoly` entries in ``l``.

    Rows 1-3 are F0, F1, F2; rows 4-6 are dJ/dx, dJ/dy, dJ/dz.
    """
    one = t111 * 0 + 1
    l = UniPoly([0 * one, one])
    l2 = l * l
    c = lambda v: UniPoly([v])
    m = 8 * t112 * t122 - 8 * t111 * t222
    return [
        [c(t111), c(t122), c(0 * one), c(2 * t112), -l, c(0 * one)],
        [c(t112), c(t222), c(0 * one), c(2 * t122), c(0 * one), -l],
        [c(one), c(one), c(-one), c(0 * one), c(0 * one), c(0 * one)],
        [12 * t122 * l, (4 * t111 - 8 * t122) * l, (4 * t111 + 4 * t122) * l,
         (8 * t222 - 16 * t112) * l, c(16 * t112 ** 2 - 16 * t111 * t122) - 4 * l2, c(m)],
        [(4 * t222 - 8 * t112) * l, 12 * t112 * l, (4 * t112 + 4 * t222) * l,
         (8 * t111 - 16 * t122) * l, c(m), c(16 * t122 ** 2 - 16 * t112 * t222) - 4 * l2],
        [c(8 * t112 ** 2 - 8 * t111 * t122) - 2 * l2, c(8 * t122 ** 2 - 8 * t222 * t112) - 2 * l2,
         -6 * l2, c(m), (8 * t122 + 8 * t111) * l, (8 * t112 + 8 * t222) * l],
    ]


def salmon_char_poly(S, backend=None):
    """Characteristic polynomial ``psi_S(l)`` of ``S`` in Sym^3(R^2).

    Parameters
    ----------
    S : array_like, shape (2, 2, 2)
        Symmetric tensor.
    backend : {"rational", "float"}, optional
        Defaults to rational for exact input and float otherwise. The float
        backend runs the same exact elimination on the binary values of the
        entries and rounds the coefficients at the end.

    Returns
    -------
    UniPoly
        Polynomial of degree at most 6 in ascending coefficient order.
    """
    backend = _backend(S, backend)
    entries = _entries(S, exact=True)
    psi = poly_det(salmon_matrix(*entries))
    psi = UniPoly([c / 512 for c in psi.coeffs])
    return psi if backend == "rational" else psi.to_float()


def _backend(S, backend):
    if backend is None:
        return "rational" if asarray(S).dtype == object else "float"
    if backend not in ("rational", "float"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def eigen_discriminant(S, backend=None):
    """Resultant of ``psi_S`` and its derivative.

    For a characteristic polynomial of full degree 6 this is the
    determinant of an 11x11 Sylvester matrix.
    """
    psi = salmon_char_poly(S, backend)
    if psi.degree < 1:
        raise CertificationError("characteristic polynomial is constant or identically zero")
    return sylvester_resultant(psi, psi.deriv())


def discriminant_error_bound(S, samples=PERTURB_SAMPLES, rtol=PERTURB_RTOL, seed=0):
    """Heuristic error bound for the float discriminant.

    Re-evaluates the float discriminant at ``samples`` symmetric
    perturbations of relative size ``rtol`` and returns ten times the largest
    deviation, floored by the rounding level of the Sylvester determinant
    (machine epsilon times its Hadamard bound).
    """
    A = asarray(S).astype(float)
    base = eigen_discriminant(A, "float")
    rng = np.random.default_rng(seed)
    scale = max(float(np.max(np.abs(A))), np.finfo(float).tiny)
    dev = 0.0
    for _ in range(samples):
        P = _from_entries(*(A[idx] + rtol * scale * e
                            for idx, e in zip(_ENTRY_INDEX, rng.standard_normal(4))))
        dev = max(dev, abs(eigen_discriminant(P, "float") - base))
    psi = salmon_char_poly(A, "float")
    M = np.array(sylvester_matrix(psi, psi.deriv()), dtype=float)
    hadamard = float(np.prod(np.linalg.norm(M, axis=1)))
    rounding = len(M) * np.finfo(float).eps * hadamard
    return 10 * max(dev, rounding)


_ENTRY_INDEX = [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)]


def _from_entries(t111, t112, t122, t222):
    """Symmetric 2x2x2 array from its four distinct entries."""
    vals = (t111, t112, t122, t222)
    A = np.empty((2, 2, 2), dtype=object if isinstance(t111, Fraction) else float)
    for idx in np.ndindex(2, 2, 2):
        A[idx] = vals[sum(idx)]
    return A


@dataclass(frozen=True)
class Certificate:
    """Outcome of the discriminant test for a unique best rank-one approximation.

    ``certified-unique`` is a proof on the rational backend. ``not-certified``
    and ``indeterminate`` do not assert non-uniqueness.
    """
    psi: UniPoly
    discriminant: object
    verdict: str
    backend: str
    error_bound: float = 0.0
    nonnegative: bool = False
    context: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(self.report(), sort_keys=True)

    def report(self):
        return {
            "psi": [_fmt(c) for c in self.psi.coeffs],
            "discriminant": _fmt(self.discriminant),
            "verdict": self.verdict,
            "backend": self.backend,
        }


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def certify_unique(S, backend=None):
    """Certify that ``S`` has a unique best symmetric rank-one approximation.

    A nonzero eigen discriminant makes every normalized eigenvalue simple,
    so the spectral-norm eigenvalue has a single eigenvector class. For a
    nonnegative ``S`` the certified approximation is also the unique best
    nonnegative symmetric one.
    """
    backend = _backend(S, backend)
    A = asarray(S)
    if backend == "rational" and A.dtype != object:
        A = SymTensor(np.vectorize(Fraction, otypes=[object])(A)).data
    psi = salmon_char_poly(A, backend)
    if psi.degree < 1:
        raise CertificationError("characteristic polynomial is constant or identically zero")
    disc = sylvester_resultant(psi, psi.deriv())
    nonneg = bool(np.all(A.astype(float) >= 0))
    if backend == "rational":
        verdict = CERTIFIED if disc != 0 else NOT_CERTIFIED
        bound = 0.0
    else:
        bound = discriminant_error_bound(A)
        verdict = CERTIFIED if abs(disc) > bound else INDETERMINATE
    return Certificate(psi, disc, verdict, backend, bound, nonneg,
                       {"symmetric": True, "nonnegative": nonneg})

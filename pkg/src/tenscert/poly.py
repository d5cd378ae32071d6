"""Univariate polynomials, fraction-free determinants and Sylvester resultants.

Coefficients are stored in ascending degree and may be
:class:`fractions.Fraction` (exact) or ``float``. Arithmetic never mixes
the two silently: an exact polynomial stays exact.
"""
from fractions import Fraction

import numpy as np

__all__ = ["UniPoly", "bareiss_det", "poly_det", "sylvester_matrix", "sylvester_resultant"]


def _is_zero(c):
    return c == 0


class UniPoly:
    """Polynomial ``c_0 + c_1 x + ... + c_m x^m`` with ascending coefficients.

    Trailing zero coefficients are stripped, so ``coeffs[-1]`` is the
    leading coefficient unless the polynomial is zero (``coeffs == ()``).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def x(cls, one=Fraction(1)):
        return cls([0 * one, one])

    @property
    def degree(self):
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def lc(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def exact(self):
        return all(isinstance(c, (Fraction, int)) for c in self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = UniPoly([other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)!r})"

    def __str__(self):
        if self.is_zero:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if _is_zero(c):
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            terms.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(terms)

    def _lift(self, other):
        if isinstance(other, UniPoly):
            return other
        return UniPoly([other])

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero or other.is_zero:
            return UniPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = UniPoly([self.coeffs[-1] ** 0 if self.coeffs else 1])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other):
        """Euclidean division; returns ``(quotient, remainder)``."""
        other = self._lift(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly(), UniPoly(rem)
        quot = [0] * (dq + 1)
        lc = other.lc
        exact = self.exact and other.exact
        for k in range(dq, -1, -1):
            c = rem[k + other.degree]
            c = Fraction(c) / lc if exact else c / lc
            quot[k] = c
            if _is_zero(c):
                continue
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * b
        return UniPoly(quot), UniPoly(rem[:other.degree])

    def exact_div(self, other):
        """Quotient of a division known to be exact.

        On the exact backend a nonzero remainder raises; on floats the
        remainder is rounding noise and is discarded.
        """
        q, r = self.divmod(other)
        if not r.is_zero and self.exact and self._lift(other).exact:
            raise ArithmeticError("division is not exact")
        return q

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def deriv(self):
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def scale_arg(self, c):
        """Polynomial ``x -> p(c x)``."""
        return UniPoly([a * c ** k for k, a in enumerate(self.coeffs)])

    def to_float(self):
        return UniPoly([float(c) for c in self.coeffs])

    def roots(self):
        """Complex roots as a numpy array (float evaluation)."""
        if self.degree < 1:
            return np.array([], dtype=complex)
        return np.roots([float(c) for c in reversed(self.coeffs)]).astype(complex)

    def real_roots(self, imag_tol=1e-9):
        r = self.roots()
        scale = max(1.0, float(np.max(np.abs(r)))) if r.size else 1.0
        return np.sort(r[np.abs(r.imag) <= imag_tol * scale].real)


def _scalar_zero(x):
    if isinstance(x, UniPoly):
        return x.is_zero
    return x == 0


def _div(a, b):
    if isinstance(a, UniPoly):
        return a.exact_div(b)
    if isinstance(a, (Fraction, int)) and isinstance(b, (Fraction, int)):
        q = Fraction(a) / Fraction(b)
        return q
    return a / b


def bareiss_det(M):
    """Determinant by fraction-free (Bareiss) elimination.

    Entries may be ints, :class:`Fraction`, floats or :class:`UniPoly`.
    Every intermediate division is exact in the entry ring, so integer
    and polynomial matrices never leave their ring.
    """
    A = [list(row) for row in M]
    n = len(A)
    if n == 0:
        return 1
    if any(len(row) != n for row in A):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if _scalar_zero(A[k][k]):
            swap = next((r for r in range(k + 1, n) if not _scalar_zero(A[r][k])), None)
            if swap is None:
                return A[k][k] * 0 if isinstance(A[k][k], UniPoly) else 0 * A[k][k]
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = _div(num, prev) if k > 0 else num
        prev = A[k][k]
    det = A[n - 1][n - 1]
    return -det if sign < 0 else det


def poly_det(M):
    """Determinant of a matrix whose entries are :class:`UniPoly`."""
    rows = [[e if isinstance(e, UniPoly) else UniPoly([e]) for e in row] for row in M]
    det = bareiss_det(rows)
    return det if isinstance(det, UniPoly) else UniPoly([det])


def sylvester_matrix(p, q):
    """Sylvester matrix of ``p`` (degree m) and ``q`` (degree n), size m+n.

    The first n rows hold shifted coefficients of p (descending), the last
    m rows those of q.
    """
    m, n = p.degree, q.degree
    size = m + n
    zero = 0 * (p.coeffs[0] if p.coeffs else 0)
    rows = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for s in range(n):
        rows.append([zero] * s + pc + [zero] * (size - s - len(pc)))
    for s in range(m):
        rows.append([zero] * s + qc + [zero] * (size - s - len(qc)))
    return rows


def sylvester_resultant(p, q):
    """Resultant of two univariate polynomials via the Sylvester determinant.

    Exact inputs give an exact :class:`Fraction`; float inputs give a float.
    A constant argument follows the convention ``Res(p, c) = c**deg p``.
    """
    if p.is_zero or q.is_zero:
        raise ValueError("resultant with the zero polynomial is undefined")
    m, n = p.degree, q.degree
    if m == 0 and n == 0:
        return Fraction(1) if p.exact and q.exact else 1.0
    if n == 0:
        return q.lc ** m
    if m == 0:
        return p.lc ** n
    S = sylvester_matrix(p, q)
    if p.exact and q.exact:
        return Fraction(bareiss_det([[Fraction(x) for x in row] for row in S]))
    return float(np.linalg.det(np.array(S, dtype=float)))

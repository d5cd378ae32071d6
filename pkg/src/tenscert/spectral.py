"""Enumeration of normalized singular pairs and eigenpairs at desk scale.

Seeds come from nested per-mode lattices on the unit hemisphere, so raising
``grid_density`` only adds seeds; each seed is polished by Newton's method on
the square stationarity system and the survivors are merged into
equivalence classes. Completeness is heuristic: the inventory is an oracle,
not a proof.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.stats import qmc

from . import _systems
from .rankone import CLASS_TOL, SingularPair, dedupe, same_class
from .tensor import asarray, hs_norm, is_symmetric, rayleigh

__all__ = [
    "EigenPair", "PairInventory", "DegenerateSpectrum",
    "hemisphere_lattice", "enumerate_singular_pairs", "enumerate_eigenpairs",
    "is_simple", "sigma2_condition", "eigen_class_bound", "rotate_symmetric",
]

MAX_ENTRIES = 256
NEWTON_ITERS = 60
# seeds keep iterating until this relative residual so that repeated roots,
# where Newton is only linear, still land within the class tolerance
_SETTLE = 1e-15


class DegenerateSpectrum(ValueError):
    """The tensor has a continuum of pairs (for example the zero tensor)."""


@dataclass
class EigenPair:
    """Normalized eigenpair: ``<T, u^(d-1)> = lam u`` with ``||u|| = 1``."""
    lam: float
    vector: np.ndarray
    residual: float
    order: int = 3
    info: dict = field(default_factory=dict, repr=False)

    def flipped(self):
        return EigenPair((-1) ** self.order * self.lam, -self.vector, self.residual,
                         self.order, self.info)

    def canonical(self):
        if self.order % 2 == 1:
            flip = self.lam < 0 or (self.lam == 0 and _lead_sign(self.vector) < 0)
        else:
            flip = _lead_sign(self.vector) < 0
        return self.flipped() if flip else self


def _lead_sign(v, tol=1e-8):
    for x in v:
        if abs(x) > tol:
            return 1 if x > 0 else -1
    return 1


def same_eigen_class(p, q, tol=CLASS_TOL):
    for cand in (q, q.flipped()):
        if abs(p.lam - cand.lam) <= tol and np.max(np.abs(p.vector - cand.vector)) <= tol:
            return True
    return False


@dataclass
class PairInventory:
    """Deduplicated classes found by an enumeration run.

    ``dropped`` counts seeds whose Newton run did not reach the tolerance.
    ``flat`` lists class indices whose Jacobian is numerically singular
    (a repeated or non-isolated pair).
    """
    classes: list
    grid_density: int
    tolerance: float
    kind: str
    order: int
    seeds: int = 0
    dropped: int = 0
    flat: list = field(default_factory=list)

    def __len__(self):
        return len(self.classes)

    @property
    def values(self):
        return [c.lam for c in self.classes]

    def matches(self, c, lam, tol):
        if self.kind == "singular":
            return abs(abs(c.lam) - abs(lam)) <= tol
        if self.order % 2 == 1:
            return abs(c.lam - lam) <= tol or abs(-c.lam - lam) <= tol
        return abs(c.lam - lam) <= tol


def _vdc(k, base=2):
    out, denom = 0.0, 1.0
    while k:
        k, r = divmod(k, base)
        denom *= base
        out += r / denom
    return out


def hemisphere_lattice(n, density):
    """``density`` unit vectors in R^n with positive leading sign.

    The point sets are nested: the lattice at a smaller density is a prefix
    of the lattice at a larger one. n = 2 uses van der Corput angles on
    [0, pi); n >= 3 maps an unscrambled Halton sequence through the normal
    quantile function.
    """
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        th = np.pi * np.array([_vdc(k) for k in range(density)])
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    from scipy.stats import norm
    pts = qmc.Halton(d=n, scramble=False).random(density + 1)[1:]
    g = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    lead = np.array([_lead_sign(v, 0.0) for v in g])
    return g * lead[:, None]


def _as_float(T, name):
    A = asarray(T).astype(float)
    if A.size > MAX_ENTRIES:
        raise ValueError(f"{name}: {A.size} entries exceeds desk scale ({MAX_ENTRIES})")
    if hs_norm(A) == 0:
        raise DegenerateSpectrum("the zero tensor has a continuum of pairs")
    return A


def _polish_in_chunks(step_fn, residual_fn, state, accept, settle, iters, chunk=4096):
    """Batched Newton on an active set.

    A seed leaves the batch once its residual is below ``settle``, or once it
    is below ``accept`` and a step no longer halves it (rounding floor).
    """
    Z = state[0].shape[0]
    best = [s.copy() for s in state]
    best_res = residual_fn(best)
    active = np.nonzero(best_res > settle)[0]
    cur = [s.copy() for s in state]
    for _ in range(iters):
        if active.size == 0:
            break
        keep = []
        for start in range(0, active.size, chunk):
            idx = active[start:start + chunk]
            new = step_fn([s[idx] for s in cur])
            for s, v in zip(cur, new):
                s[idx] = v
            r = residual_fn([s[idx] for s in cur])
            prev = best_res[idx]
            better = r < prev
            for b, s in zip(best, cur):
                b[idx[better]] = s[idx[better]]
            best_res[idx] = np.minimum(r, prev)
            progressing = r < 0.5 * prev
            keep.append(idx[(best_res[idx] > settle) & ((best_res[idx] > accept) | progressing)])
        active = np.concatenate(keep)
    return best, best_res, Z


def _singular_jacobian_flat(A, vecs, rtol=1e-8):
    U = [v[None, :] for v in vecs]
    d = A.ndim
    dims = A.shape
    off = np.concatenate([[0], np.cumsum(dims)])
    N = int(off[-1])
    lam = float(rayleigh(A, vecs))
    J = np.zeros((N + d, N + d))
    for i in range(d):
        si = slice(off[i], off[i + 1])
        J[si, si] = -lam * np.eye(dims[i])
        J[si, N + i] = -vecs[i]
        J[N + i, si] = vecs[i]
        for j in range(d):
            if j != i:
                M = _systems.batch_contract(A, U, (min(i, j), max(i, j)))[0]
                J[si, off[j]:off[j + 1]] = M if i < j else M.T
    s = np.linalg.svd(J, compute_uv=False)
    return s[-1] <= rtol * max(1.0, s[0])


def enumerate_singular_pairs(T, grid_density=20, tol=1e-10, iters=NEWTON_ITERS):
    """All normalized singular pair classes reachable from a seed lattice.

    Parameters
    ----------
    T : array_like
        Nonzero tensor with at most 256 entries.
    grid_density : int
        Lattice points per mode; the seed set is their Cartesian product.
    tol : float
        Residual tolerance, relative to ``max(1, ||T||)``.

    Returns
    -------
    PairInventory
        Classes of :class:`~tenscert.rankone.SingularPair` sorted by
        decreasing ``|lam|``, one canonical representative each.
    """
    A = _as_float(T, "enumerate_singular_pairs")
    d = A.ndim
    scale = max(1.0, hs_norm(A))
    lattices = [hemisphere_lattice(n, grid_density) for n in A.shape]
    grid = list(itertools.product(*[range(len(L)) for L in lattices]))
    U = [L[[g[k] for g in grid]] for k, L in enumerate(lattices)]

    def resid(state):
        return _systems.singular_residuals(A, state)[2]

    U, res, Z = _polish_in_chunks(lambda s: _systems.singular_newton_step(A, s),
                                  resid, U, tol * scale, _SETTLE * scale, iters)
    ok = np.nonzero(res <= tol * scale)[0]
    pairs = []
    for z in _distinct_rows(_canonical_keys(A, [u[ok] for u in U]), ok):
        vecs = tuple(u[z].copy() for u in U)
        lam = float(rayleigh(A, vecs))
        pairs.append(SingularPair(lam, vecs, float(res[z])).canonical())
    pairs.sort(key=lambda p: (-round(abs(p.lam), 9), p.residual))
    classes = dedupe(pairs)
    classes = [_clean_zero(c) for c in classes]
    flat = [k for k, c in enumerate(classes) if _singular_jacobian_flat(A, c.vectors)]
    return PairInventory(classes, grid_density, tol, "singular", d, Z, Z - ok.size, flat)


def _canonical_keys(A, U):
    """Rows identifying the rank-one tensor ``lam u_1 x ... x u_d`` of each
    seed, rounded so that numerically equal tuples share a key."""
    d = A.ndim
    lam = _systems.singular_residuals(A, U)[1]
    T = lam.reshape((-1,) + (1,) * d)
    for k, u in enumerate(U):
        shape = [u.shape[0]] + [1] * d
        shape[k + 1] = u.shape[1]
        T = T * u.reshape(shape)
    return np.round(T.reshape(len(lam), -1), 7)


def _distinct_rows(keys, index):
    """Entries of ``index`` whose key row is first seen, in order."""
    if len(index) == 0:
        return index
    _, first = np.unique(keys, axis=0, return_index=True)
    return index[np.sort(first)]


def _clean_zero(p):
    p.vectors = tuple(np.where(np.abs(u) < 1e-14, 0.0, u) + 0.0 for u in p.vectors)
    return p


def eigen_class_bound(n, d):
    """Upper bound on the number of eigenpair classes when they are finite."""
    if d == 2:
        return n
    return ((d - 1) ** n - 1) // (d - 2)


def enumerate_eigenpairs(S, grid_density=64, tol=1e-10, iters=NEWTON_ITERS):
    """All normalized eigenpair classes of a symmetric tensor reachable from
    a hemisphere seed lattice.

    Raises
    ------
    DegenerateSpectrum
        For the zero tensor, or when more classes turn up than a tensor with
        finitely many eigenvectors can have.
    """
    A = _as_float(S, "enumerate_eigenpairs")
    if not is_symmetric(A, rtol=1e-12):
        raise ValueError("enumerate_eigenpairs needs a symmetric tensor")
    d, n = A.ndim, A.shape[0]
    if d < 2:
        raise ValueError("eigenpairs need order >= 2")
    scale = max(1.0, hs_norm(A))
    seeds = hemisphere_lattice(n, grid_density)

    def resid(state):
        return _systems.eigen_residuals(A, state[0])[2]

    (u,), res, Z = _polish_in_chunks(lambda s: [_systems.eigen_newton_step(A, s[0])],
                                     resid, [seeds], tol * scale, _SETTLE * scale, iters)
    ok = np.nonzero(res <= tol * scale)[0]
    pairs = []
    for z in ok:
        v = u[z].copy()
        lam = float(rayleigh(A, [v] * d))
        pairs.append(EigenPair(lam, v, float(res[z]), d).canonical())
    pairs.sort(key=lambda p: (-round(p.lam, 9), p.residual))
    classes = dedupe(pairs, key=same_eigen_class)
    for c in classes:
        c.vector = np.where(np.abs(c.vector) < 1e-14, 0.0, c.vector) + 0.0
    if len(classes) > eigen_class_bound(n, d):
        raise DegenerateSpectrum(
            f"{len(classes)} eigenvector classes exceed the finite bound "
            f"{eigen_class_bound(n, d)}: the eigenvectors form a continuum")
    flat = [k for k, c in enumerate(classes) if _eigen_jacobian_flat(A, c)]
    return PairInventory(classes, grid_density, tol, "eigen", d, Z, Z - ok.size, flat)


def _eigen_jacobian_flat(A, pair, rtol=1e-8):
    d, n = A.ndim, A.shape[0]
    u = pair.vector
    M = _systems.batch_contract(A, [u[None, :]] * d, (0, 1))[0]
    J = np.zeros((n + 1, n + 1))
    J[:n, :n] = (d - 1) * M - pair.lam * np.eye(n)
    J[:n, n] = -u
    J[n, :n] = u
    s = np.linalg.svd(J, compute_uv=False)
    return s[-1] <= rtol * max(1.0, s[0])


def is_simple(inv, lambda_star, tol=CLASS_TOL):
    """Whether exactly one class of ``inv`` attains ``lambda_star``.

    Returns
    -------
    simple : bool
    witnesses : list
        The classes within ``tol`` of ``lambda_star`` (up to equivalence).
    """
    witnesses = [c for c in inv.classes if inv.matches(c, lambda_star, tol)]
    return len(witnesses) == 1, witnesses


def sigma2_condition(S, u, tol=1e-8):
    """Second-order uniqueness test for positive symmetric 3-tensors.

    Computes ``sigma2 = min |<S, u.v.v>|`` over unit ``v`` orthogonal to
    ``u``, which is the smallest absolute value the quadratic form
    ``v -> v' <S, u> v`` takes on the unit sphere of the complement. When
    ``sigma2 >= rho / 2`` (``rho = <S, u^3>``) the best nonnegative symmetric
    rank-one approximation is unique.

    Returns
    -------
    sigma2 : float
    certified : bool
    """
    A = asarray(S).astype(float)
    if A.ndim != 3 or len(set(A.shape)) != 1:
        raise ValueError("sigma2_condition needs a cubical 3-tensor")
    if not is_symmetric(A):
        raise ValueError("tensor is not symmetric")
    if np.any(A <= 0):
        raise ValueError("sigma2_condition needs a strictly positive tensor")
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1) > tol:
        raise ValueError("u must be a unit vector")
    rho = float(rayleigh(A, [u, u, u]))
    g = np.tensordot(np.tensordot(A, u, axes=([2], [0])), u, axes=([1], [0]))
    if np.linalg.norm(g - rho * u) > tol * max(1.0, hs_norm(A)):
        raise ValueError("u is not an eigenvector of S")
    M = np.tensordot(A, u, axes=([0], [0]))
    Q = null_space(u[None, :])
    ev = np.linalg.eigvalsh(Q.T @ M @ Q)
    if ev[0] <= 0 <= ev[-1]:
        sigma2 = 0.0
    else:
        sigma2 = float(min(abs(ev[0]), abs(ev[-1])))
    return sigma2, sigma2 >= rho / 2


def rotate_symmetric(S, g):
    """Apply the orthogonal (or any square) matrix ``g`` to every mode."""
    A = asarray(S)
    out = A
    for k in range(A.ndim):
        out = np.moveaxis(np.tensordot(g, out, axes=([1], [k])), 0, k)
    return out

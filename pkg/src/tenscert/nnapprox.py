"""Best nonnegative rank-r approximation and its optimality checks.

:func:`anls` minimizes ``||T - X||`` over ``X = sum_p u_{1,p} x ... x u_{d,p}``
with nonnegative factors by block-coordinate descent: each block is one
mode's factor matrix, fitted by projected coordinate descent on the
nonnegative least-squares subproblem. All restarts are advanced together as
one batch, so results never depend on scheduling.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .rankone import nonneg_best_rank_one
from .tensor import asarray, hs_norm, inner, outer

__all__ = [
    "NNFactors", "KKTReport", "ANLSResult", "DeflationReport", "PreconditionError",
    "anls", "kkt_verify", "residual_positive_witness", "exact_rank_check",
    "compare_deflation", "positive_instance", "hyperdeterminant", "distinct_fits",
]

ZERO_TERM_RTOL = 1e-12
KKT_STOP_RTOL = 1e-10
NNRANK_CERT_RTOL = 1e-6


class PreconditionError(ValueError):
    pass


class NNFactors:
    """Nonnegative factor matrices ``A_i`` of shape ``(n_i, r)``.

    Column ``p`` of every ``A_i`` is the term ``u_{i,p}``. Terms are balanced
    so that each mode carries the same norm.
    """

    def __init__(self, factors, prune_rtol=None, ref_norm=None):
        mats = [np.array(A, dtype=float).reshape(len(A), -1) for A in factors]
        if len({A.shape[1] for A in mats}) != 1:
            raise ValueError("factor matrices disagree on the number of terms")
        if any(np.any(A < 0) for A in mats):
            raise ValueError("factors must be nonnegative")
        mats = _balance(mats)
        if prune_rtol is not None:
            ref = ref_norm if ref_norm is not None else 1.0
            norms = np.prod([np.linalg.norm(A, axis=0) for A in mats], axis=0)
            keep = norms > prune_rtol * ref
            mats = [A[:, keep] for A in mats]
        for A in mats:
            A.flags.writeable = False
        self.factors = tuple(mats)
        self._X = None

    @classmethod
    def from_terms(cls, terms):
        """Build from a list of ``(u_1, ..., u_d)`` tuples, one per term."""
        d = len(terms[0])
        return cls([np.stack([np.asarray(t[i], float) for t in terms], axis=1) for i in range(d)])

    @property
    def r(self):
        return self.factors[0].shape[1]

    @property
    def shape(self):
        return tuple(A.shape[0] for A in self.factors)

    @property
    def vectors(self):
        """Per term, the tuple ``(u_{1,p}, ..., u_{d,p})``."""
        return self.terms()

    def term(self, p):
        return tuple(A[:, p] for A in self.factors)

    def terms(self):
        return [self.term(p) for p in range(self.r)]

    def term_norms(self):
        return np.prod([np.linalg.norm(A, axis=0) for A in self.factors], axis=0)

    def tensor(self):
        if self._X is None:
            X = np.zeros(self.shape)
            for p in range(self.r):
                X += outer(self.term(p))
            X.flags.writeable = False
            self._X = X
        return self._X

    def __repr__(self):
        return f"NNFactors(shape={self.shape}, r={self.r})"


def _balance(mats):
    norms = np.stack([np.linalg.norm(A, axis=0) for A in mats])
    d = len(mats)
    alive = np.all(norms > 0, axis=0)
    geo = np.where(alive, np.prod(np.where(alive, norms, 1.0), axis=0) ** (1.0 / d), 0.0)
    out = []
    for A, n in zip(mats, norms):
        s = np.where(alive, geo / np.where(n > 0, n, 1.0), 0.0)
        out.append(A * s)
    return out


@dataclass
class KKTReport:
    """Violations of the nonnegative stationarity conditions.

    ``max_inequality_violation`` is the largest positive part of
    ``<T - X, u_{1,p} x .. e_j .. x u_{d,p}>`` over all coordinate
    directions; ``max_equality_violation`` is the largest ``|.|`` of the same
    quantity over directions inside the support of ``u_{i,p}``. ``witness``
    is ``(i, p, j)`` of the worst violation, or None when both are zero.
    """
    max_equality_violation: float
    max_inequality_violation: float
    witness: tuple = None

    def passes(self, tol):
        return self.max_equality_violation <= tol and self.max_inequality_violation <= tol


def _mode_gradients(A, factors):
    """Per mode ``(M_i, A_i G_i)`` where ``M_i[j, p] = <T, ..e_j..>`` and
    ``(A_i G_i)[j, p] = <X, ..e_j..>`` along term p."""
    d = A.ndim
    out = []
    for i in range(d):
        others = [factors[k] for k in range(d) if k != i]
        M = _mttkrp(A, factors, i)
        G = np.ones((factors[i].shape[1],) * 2)
        for F in others:
            G = G * (F.T @ F)
        out.append((M, factors[i] @ G))
    return out


def _mttkrp(A, factors, i):
    d = A.ndim
    letters = "abcdefgh"[:d]
    ops, subs = [A], [letters]
    for k in range(d):
        if k != i:
            ops.append(factors[k])
            subs.append(letters[k] + "z")
    return np.einsum(",".join(subs) + "->" + letters[i] + "z", *ops)


def kkt_verify(T, F, tol=0.0):
    """Check the first-order conditions a best nonnegative approximation obeys.

    For every mode ``i``, term ``p`` and basis vector ``e_j`` the value
    ``<T - X, u_{1,p} x .. e_j .. x u_{d,p}>`` must be ``<= 0``, with
    equality when ``j`` is in the support of ``u_{i,p}``. The fixed vectors
    ``u_{k,p}`` (``k != i``) enter normalized, so the report does not depend
    on how a term's scale is spread over its modes.

    Returns
    -------
    KKTReport
    """
    A = asarray(T).astype(float)
    if F.shape != A.shape:
        raise ValueError(f"factor shape {F.shape} does not match tensor shape {A.shape}")
    eq = ineq = 0.0
    witness = None
    worst = 0.0
    norms = np.stack([np.linalg.norm(U, axis=0) for U in F.factors])
    for i, (M, AG) in enumerate(_mode_gradients(A, list(F.factors))):
        others = np.prod(np.delete(norms, i, axis=0), axis=0)
        D = (M - AG) / np.where(others > 0, others, 1.0)
        supp = F.factors[i] > 0
        e = np.where(supp, np.abs(D), 0.0)
        q = np.maximum(D, 0.0)
        eq = max(eq, float(e.max(initial=0.0)))
        ineq = max(ineq, float(q.max(initial=0.0)))
        both = np.maximum(e, q)
        if both.size and both.max() > worst:
            worst = float(both.max())
            j, p = np.unravel_index(np.argmax(both), both.shape)
            witness = (i, int(p), int(j))
    if worst <= tol:
        witness = None if worst == 0 else witness
    return KKTReport(eq, ineq, witness)


def residual_positive_witness(T, F):
    """A multi-index where ``T - X`` is positive, as ``(index, value)``, or None.

    The largest positive entry is returned.
    """
    A = asarray(T).astype(float)
    R = A - F.tensor()
    k = int(np.argmax(R))
    if R.flat[k] <= 0:
        return None
    return tuple(int(x) for x in np.unravel_index(k, R.shape)), float(R.flat[k])


def _witness_term(R):
    """Rank-one nonnegative tensor holding the largest positive entry of R."""
    k = int(np.argmax(R))
    v = float(R.flat[k])
    if v <= 0:
        return None
    idx = np.unravel_index(k, R.shape)
    root = v ** (1.0 / R.ndim)
    vecs = []
    for n, j in zip(R.shape, idx):
        e = np.zeros(n)
        e[j] = root
        vecs.append(e)
    return vecs


def exact_rank_check(T, F, tol=1e-10):
    """Whether ``F`` plausibly uses exactly ``F.r`` nonnegative terms.

    False when some term vanishes (norm ``<= 1e-12 ||T||``) or when dropping
    a term and adding the single-entry witness term of the resulting
    residual beats ``F`` by more than ``tol * ||T||``.
    """
    A = asarray(T).astype(float)
    nT = hs_norm(A)
    if np.any(F.term_norms() <= ZERO_TERM_RTOL * max(nT, np.finfo(float).tiny)):
        return False
    base = hs_norm(A - F.tensor())
    for p in range(F.r):
        X = F.tensor() - outer(F.term(p))
        w = _witness_term(A - X)
        if w is None:
            cand = hs_norm(A - X)
        else:
            cand = hs_norm(A - X - outer(w))
        if cand < base - tol * max(nT, 1.0):
            return False
    return True


@dataclass
class ANLSResult:
    """Outcome of :func:`anls`; unpacks as ``factors, residual``."""
    factors: NNFactors
    residual: float
    converged: bool
    restart: int
    iterations: int
    residuals: np.ndarray = field(repr=False, default=None)
    runs: list = field(repr=False, default_factory=list)
    history: np.ndarray = field(repr=False, default=None)

    def __iter__(self):
        yield self.factors
        yield self.residual


def _init_factors(A, r, seed, restarts):
    nT = hs_norm(A)
    d = A.ndim
    mats = [np.empty((restarts, n, r)) for n in A.shape]
    for k in range(restarts):
        rng = np.random.default_rng([int(seed), int(k)])
        F = [rng.random((n, r)) for n in A.shape]
        X = np.zeros(A.shape)
        for p in range(r):
            X += outer([f[:, p] for f in F])
        s = (nT / hs_norm(X)) ** (1.0 / d) if nT > 0 else 1.0
        for i in range(d):
            mats[i][k] = F[i] * s
    return mats


def _batch_mttkrp(A, mats, i):
    d = A.ndim
    letters = "abcdefgh"[:d]
    ops, subs = [A], [letters]
    for k in range(d):
        if k != i:
            ops.append(mats[k])
            subs.append("Z" + letters[k] + "z")
    return np.einsum(",".join(subs) + "->Z" + letters[i] + "z", *ops, optimize=A.size > 512)


def _batch_gram(mats, i):
    G = None
    for k, F in enumerate(mats):
        if k == i:
            continue
        g = np.einsum("Zaz,Zay->Zzy", F, F)
        G = g if G is None else G * g
    return G


def _batch_res2(nT2, Ai, M, G):
    """Squared residual from the mode-i quantities (no full reconstruction)."""
    cross = np.einsum("Zaz,Zaz->Z", Ai, M)
    xx = np.einsum("Zaz,Zay,Zzy->Z", Ai, Ai, G)
    return nT2 - 2 * cross + xx


def _hals_block(Ai, M, G, inner_tol, inner_cap):
    """Projected coordinate descent on min ||T_(i) - Ai B'||, Ai >= 0."""
    r = Ai.shape[2]
    diag = np.einsum("Zzz->Zz", G)
    safe = np.where(diag > 0, diag, 1.0)
    for _ in range(inner_cap):
        change = 0.0
        for p in range(r):
            old = Ai[:, :, p].copy()
            grad = M[:, :, p] - (Ai @ G[:, :, p, None])[:, :, 0]
            new = np.maximum(0.0, old + grad / safe[:, p, None])
            new = np.where(diag[:, p, None] > 0, new, old)
            Ai[:, :, p] = new
            change = max(change, float(np.max(np.abs(new - old))))
        if change <= inner_tol:
            break
    return Ai


def _batch_revive(A, mats):
    """Replace vanished terms by the positive-residual witness term."""
    d = A.ndim
    Z, r = mats[0].shape[0], mats[0].shape[2]
    norms = np.prod([np.linalg.norm(F, axis=1) for F in mats], axis=0)
    nT = hs_norm(A)
    dead = norms <= ZERO_TERM_RTOL * max(nT, np.finfo(float).tiny)
    if not dead.any():
        return mats
    for z in np.nonzero(dead.any(axis=1))[0]:
        for p in np.nonzero(dead[z])[0]:
            X = np.zeros(A.shape)
            for q in range(r):
                if q != p:
                    X += outer([F[z, :, q] for F in mats])
            w = _witness_term(A - X)
            for i in range(d):
                mats[i][z, :, p] = 0.0 if w is None else w[i]
    return mats


def _batch_kkt(A, mats):
    d = A.ndim
    worst = np.zeros(mats[0].shape[0])
    for i in range(d):
        M = _batch_mttkrp(A, mats, i)
        G = _batch_gram(mats, i)
        D = M - np.einsum("Zaz,Zzy->Zay", mats[i], G)
        v = np.where(mats[i] > 0, np.abs(D), np.maximum(D, 0.0))
        worst = np.maximum(worst, v.reshape(len(worst), -1).max(axis=1))
    return worst


def _batch_balance(mats):
    d = len(mats)
    norms = np.stack([np.linalg.norm(F, axis=1) for F in mats])
    alive = np.all(norms > 0, axis=0)
    geo = np.prod(np.where(alive, norms, 1.0), axis=0) ** (1.0 / d)
    for i in range(d):
        s = np.where(alive, geo / np.where(norms[i] > 0, norms[i], 1.0), 1.0)
        mats[i] = mats[i] * s[:, None, :]
    return mats


def _jacobian(mats, shape):
    """Jacobian of vec(X) with respect to the stacked entries of each A_i."""
    d = len(mats)
    r = mats[0].shape[1]
    blocks = []
    for i in range(d):
        J = np.empty(shape + (shape[i], r))
        for p in range(r):
            vecs = [mats[k][:, p] for k in range(d)]
            vecs[i] = np.eye(shape[i])
            K = vecs[0]
            for v in vecs[1:]:
                K = np.multiply.outer(K, v)
            # identity block contributes two axes at slot i; move its column axis last
            col = i + 1
            K = np.moveaxis(K, col, -1)
            J[..., p] = K
        blocks.append(J.reshape(-1, shape[i] * r))
    return np.concatenate(blocks, axis=1)


def _unpack(x, shape, r):
    out, o = [], 0
    for n in shape:
        out.append(x[o:o + n * r].reshape(n, r))
        o += n * r
    return out


def _reconstruct(mats):
    X = 0.0
    for p in range(mats[0].shape[1]):
        X = X + outer([F[:, p] for F in mats])
    return X


def _curvature(mats, R):
    """Second-order part of the Hessian of ``0.5 ||X - T||^2``, where
    ``R = X - T``: couples entries of the same term in different modes."""
    d, r = len(mats), mats[0].shape[1]
    sizes = [F.shape[0] * r for F in mats]
    off = np.concatenate([[0], np.cumsum(sizes)])
    S = np.zeros((off[-1], off[-1]))
    letters = "abcdefgh"[:d]
    for i in range(d):
        for j in range(i + 1, d):
            for p in range(r):
                ops, subs = [R], [letters]
                for k in range(d):
                    if k not in (i, j):
                        ops.append(mats[k][:, p])
                        subs.append(letters[k])
                B = np.einsum(",".join(subs) + "->" + letters[i] + letters[j], *ops)
                rows = off[i] + np.arange(mats[i].shape[0]) * r + p
                cols = off[j] + np.arange(mats[j].shape[0]) * r + p
                S[np.ix_(rows, cols)] = B
                S[np.ix_(cols, rows)] = B.T
    return S


def _lbfgsb_polish(A, mats, maxiter=5000):
    """Bound-constrained quasi-Newton on all factor entries at once; robust
    on the flat valleys where alternating updates crawl."""
    shape, r = A.shape, mats[0].shape[1]

    def fun(x):
        F = _unpack(x, shape, r)
        f = (_reconstruct(F) - A).ravel()
        return 0.5 * (f @ f), _jacobian(F, shape).T @ f

    x0 = np.concatenate([F.ravel() for F in mats])
    out = minimize(fun, x0, jac=True, method="L-BFGS-B", bounds=[(0, None)] * x0.size,
                   options={"maxiter": maxiter, "ftol": 0.0, "gtol": 1e-14, "maxcor": 30})
    if out.fun <= fun(x0)[0]:
        return _unpack(np.maximum(out.x, 0.0), shape, r)
    return mats


def _newton_polish(A, mats, iters=60):
    """Projected Newton on the free entries, accepting only descent.

    Entries at (or numerically near) zero whose gradient points outward are
    pinned at zero, as are entries the step would push through zero. The
    step solves the exact Hessian system; where that is not a descent
    direction a damped Gauss-Newton step is used instead.
    """
    shape, r = A.shape, mats[0].shape[1]
    x = np.concatenate([F.ravel() for F in mats])
    f = (_reconstruct(mats) - A).ravel()
    best = f @ f
    scale = max(float(np.max(np.abs(x))), 1.0)
    for _ in range(iters):
        F = _unpack(x, shape, r)
        J = _jacobian(F, shape)
        g = J.T @ f
        JJ = J.T @ J
        H = JJ + _curvature(F, f.reshape(shape))
        mu = 1e-8 * max(1.0, float(np.trace(JJ)))
        pin = (x <= 1e-9 * scale) & (g > 0)
        for _ in range(x.size):
            fr = ~pin
            step = np.zeros_like(x)
            step[fr] = -np.linalg.lstsq(H[np.ix_(fr, fr)], g[fr], rcond=1e-12)[0]
            if g[fr] @ step[fr] >= 0:
                step[fr] = -np.linalg.solve(JJ[np.ix_(fr, fr)] + mu * np.eye(fr.sum()), g[fr])
            # entries the step would push through zero join the active set
            hit = fr & (x + step < 0) & (g > 0)
            if not hit.any():
                break
            pin |= hit
        accepted = False
        a = 1.0
        for _ in range(40):
            y = np.maximum(np.where(pin, 0.0, x + a * step), 0.0)
            fy = (_reconstruct(_unpack(y, shape, r)) - A).ravel()
            if fy @ fy < best:
                x, f, accepted = y, fy, True
                break
            a *= 0.5
        if not accepted:
            break
        improvement = best - f @ f
        best = f @ f
        if improvement <= 1e-30 * max(1.0, best):
            break
    return _unpack(x, shape, r)


def anls(T, r, restarts=16, seed=0, tol=KKT_STOP_RTOL, max_iters=60, track=False,
         init=None):
    """Best nonnegative rank-``r`` approximation by alternating nonnegative
    least squares.

    Parameters
    ----------
    T : array_like
        Target tensor (usually nonnegative).
    r : int
        Number of nonnegative rank-one terms, ``>= 1``.
    restarts : int
        Independent random starts; restart ``k`` draws from a generator
        seeded with ``(seed, k)``.
    tol : float
        Stop once the KKT violation is ``<= tol * ||T||`` for every restart.
    max_iters : int
        Outer sweeps over all modes.
    track : bool
        Record the squared residual after every block update in
        ``result.history`` (shape ``(updates, restarts)``).
    init : list of arrays, optional
        Starting factor matrices ``(n_i, r)`` used for a single restart.

    Returns
    -------
    ANLSResult
        Best restart (smallest residual, then lowest index). Unpacks as
        ``(factors, residual)``.
    """
    if int(r) != r or r < 1:
        raise ValueError("rank r must be a positive integer")
    r = int(r)
    A = asarray(T).astype(float)
    d = A.ndim
    nT = hs_norm(A)
    nT2 = nT * nT
    if init is not None:
        mats = [np.array(F, dtype=float)[None, :, :] for F in init]
        restarts = 1
    else:
        mats = _init_factors(A, r, seed, restarts)
    hist = []
    it = 0
    done = False
    for it in range(1, max_iters + 1):
        for i in range(d):
            M = _batch_mttkrp(A, mats, i)
            G = _batch_gram(mats, i)
            mats[i] = _hals_block(mats[i], M, G, 1e-14, 10 * r * A.shape[i])
            if track:
                hist.append(_batch_res2(nT2, mats[i], M, G))
        mats = _batch_balance(mats)
        mats = _batch_revive(A, mats)
        if it % 5 == 0 or it == max_iters:
            if np.all(_batch_kkt(A, mats) <= tol * max(nT, 1e-300)):
                done = True
                break
    if not done:
        kkt = _batch_kkt(A, mats)
        for z in np.nonzero(kkt > tol * max(nT, 1e-300))[0]:
            pol = _newton_polish(A, _lbfgsb_polish(A, [F[z] for F in mats]))
            for i in range(d):
                mats[i][z] = pol[i]
    runs = [NNFactors([F[z] for F in mats]) for z in range(mats[0].shape[0])]
    residuals = np.array([hs_norm(A - f.tensor()) for f in runs])
    best = int(np.argmin(residuals))
    final = NNFactors([F[best] for F in mats], prune_rtol=ZERO_TERM_RTOL, ref_norm=nT)
    converged = kkt_verify(A, final).passes(tol * max(nT, 1e-300))
    return ANLSResult(final, float(hs_norm(A - final.tensor())), converged, best, it,
                      residuals, runs, np.array(hist) if track else None)


def distinct_fits(result, tol=1e-6):
    """Distinct approximations ``X`` among all restarts of an :func:`anls`
    run (compared entrywise within ``tol * max(1, ||X||)``)."""
    out = []
    for f in result.runs:
        X = f.tensor()
        s = max(1.0, hs_norm(X))
        if not any(np.max(np.abs(X - Y)) <= tol * s for Y in out):
            out.append(X)
    return out


@dataclass
class DeflationReport:
    sequential_residual: float
    joint_residual: float
    gap: float
    overlap: float
    restarts: int
    seed: int
    unclipped_residual: float = float("nan")
    unclipped_overlap: float = float("nan")

    def report(self):
        return {
            "sequential_residual": self.sequential_residual,
            "joint_residual": self.joint_residual,
            "gap": self.gap,
            "overlap": self.overlap,
            "restarts": self.restarts,
            "seed": self.seed,
            "unclipped_residual": self.unclipped_residual,
            "unclipped_overlap": self.unclipped_overlap,
        }


def _unit_overlap(a, b):
    prod = 1.0
    for u, v in zip(a, b):
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        prod *= float(u @ v) / (nu * nv) if nu > 0 and nv > 0 else 0.0
    return prod


def compare_deflation(T, r=2, restarts=64, seed=0):
    """Rank-2 deflation against the joint nonnegative rank-2 fit.

    The sequential path takes the best nonnegative rank-one approximation
    ``X1`` of ``T``, then the best nonnegative rank-one approximation of the
    residual ``T - X1`` with negative entries clipped to zero. The unclipped
    variant instead fits the raw residual with one nonnegative term. The
    joint path is :func:`anls` with ``r = 2``.

    ``overlap`` is ``<u_1 x .. x u_d, v_1 x .. x v_d>`` for the unit factors
    of the two sequential terms; it would have to vanish if deflation were
    optimal.
    """
    if r != 2:
        raise ValueError("the deflation experiment is defined for r = 2")
    A = asarray(T).astype(float)
    if np.any(A <= 0):
        raise PreconditionError("compare_deflation needs a strictly positive tensor")
    nT = hs_norm(A)
    joint = anls(A, 2, restarts=restarts, seed=seed)
    if joint.residual <= NNRANK_CERT_RTOL * nT:
        raise PreconditionError(
            f"rank-2 residual {joint.residual:.2e} is below {NNRANK_CERT_RTOL:g}*||T||; "
            "nonnegative rank does not exceed 2")
    first = nonneg_best_rank_one(A, restarts=restarts, seed=seed + 1)
    X1 = first.tensor()
    R = A - X1
    second = nonneg_best_rank_one(np.maximum(R, 0.0), restarts=restarts, seed=seed + 2)
    seq = hs_norm(R - second.tensor())
    un = anls(R, 1, restarts=restarts, seed=seed + 3)
    un_terms = un.factors.terms()
    un_overlap = _unit_overlap(first.vectors, un_terms[0]) if un_terms else 0.0
    return DeflationReport(
        sequential_residual=seq,
        joint_residual=joint.residual,
        gap=seq - joint.residual,
        overlap=_unit_overlap(first.vectors, second.vectors),
        restarts=restarts, seed=seed,
        unclipped_residual=hs_norm(R - un.factors.tensor()),
        unclipped_overlap=un_overlap)


def hyperdeterminant(T):
    """Cayley's hyperdeterminant of a 2x2x2 tensor; negative exactly when the
    real rank is 3."""
    a = asarray(T)
    if a.shape != (2, 2, 2):
        raise ValueError("the hyperdeterminant is defined here for 2x2x2 tensors")
    a000, a001, a010, a011 = a[0, 0, 0], a[0, 0, 1], a[0, 1, 0], a[0, 1, 1]
    a100, a101, a110, a111 = a[1, 0, 0], a[1, 0, 1], a[1, 1, 0], a[1, 1, 1]
    return (a000**2 * a111**2 + a001**2 * a110**2 + a010**2 * a101**2 + a100**2 * a011**2
            - 2 * (a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111
                   + a000 * a100 * a011 * a111 + a001 * a010 * a101 * a110
                   + a001 * a100 * a011 * a110 + a010 * a100 * a011 * a101)
            + 4 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111))


def positive_instance(shape, rng, terms=3, max_tries=1000):
    """Strictly positive tensor built as a weighted sum of ``terms`` positive
    rank-one tensors with unit factors.

    For 2x2x2 shapes with ``terms >= 3`` draws are repeated until the
    hyperdeterminant is negative, which certifies real rank (hence
    nonnegative rank) at least 3. :func:`compare_deflation` checks the
    nonnegative rank numerically in any case.
    """
    shape = tuple(shape)
    for _ in range(max_tries):
        T = np.zeros(shape)
        for w in rng.uniform(0.5, 2.0, size=terms):
            vecs = [rng.random(n) + 0.05 for n in shape]
            T += w * outer([v / np.linalg.norm(v) for v in vecs])
        if shape != (2, 2, 2) or terms < 3 or hyperdeterminant(T) < -1e-9 * hs_norm(T) ** 4:
            return T
    raise RuntimeError("no instance with certified rank found")

"""Best rank-one approximation of dense real tensors.

The unconstrained problem is solved by the higher-order power method (HOPM)
from many starts, each run finished by Newton polishing on the singular-pair
system. For nonnegative tensors the optimum can be taken entrywise
nonnegative, which :func:`nonneg_best_rank_one` exploits. For strictly
positive tensors :func:`perron_fixed_point` finds a positive singular pair
from the l1-normalized contraction map.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _systems
from ._parallel import pmap
from .tensor import asarray, contract_except, hs_norm, outer, rayleigh

__all__ = [
    "SingularPair", "ApproxResult", "ConvergenceError", "DegenerateContraction",
    "hopm", "best_rank_one", "nonneg_best_rank_one", "perron_fixed_point",
    "kkt_check_rank_one", "same_class", "dedupe", "hosvd_init", "random_init",
    "CLASS_TOL",
]

CLASS_TOL = 1e-6
# Newton moves larger than this are treated as jumps to another pair
_POLISH_STEP_MAX = 1e-3


class ConvergenceError(RuntimeError):
    """A solver ran out of iterations; ``.result`` holds the last iterate."""

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class DegenerateContraction(ArithmeticError):
    """A mode-wise contraction vanished, so the power update is undefined."""


@dataclass
class SingularPair:
    """Normalized singular pair ``(lam, u_1, ..., u_d)``.

    ``residual`` is ``max_i ||<T, ..u_i-hat..> - lam u_i||``. ``history``
    holds the Rayleigh values after each HOPM sweep, when available.
    """
    lam: float
    vectors: tuple
    residual: float
    converged: bool = True
    sweeps: int = 0
    history: list = field(default_factory=list, repr=False)
    info: dict = field(default_factory=dict, repr=False)

    @property
    def order(self):
        return len(self.vectors)

    def flipped(self, signs):
        """Pair with ``u_i -> s_i u_i`` and ``lam -> prod(s) lam``."""
        vecs = tuple(s * u for s, u in zip(signs, self.vectors))
        return SingularPair(math.prod(signs) * self.lam, vecs, self.residual,
                            self.converged, self.sweeps, self.history, self.info)

    def canonical(self):
        """Representative with ``lam >= 0`` and the first significant entry of
        ``u_1 ... u_{d-1}`` positive (``u_d`` absorbs the compensating signs)."""
        d = self.order
        signs = [1] * d
        for i in range(d - 1):
            if _lead_sign(self.vectors[i]) < 0:
                signs[i] = -1
                signs[-1] = -signs[-1]
        p = self.flipped(signs)
        if p.lam < 0 or (p.lam == 0 and _lead_sign(p.vectors[-1]) < 0):
            s = [1] * (d - 1) + [-1]
            p = p.flipped(s)
        return p

    def tensor(self):
        return self.lam * outer(self.vectors)


def _lead_sign(v, tol=1e-8):
    for x in np.asarray(v, dtype=float):
        if abs(x) > tol:
            return 1 if x > 0 else -1
    return 1


def same_class(p, q, tol=CLASS_TOL):
    """True when two singular pairs give the same rank-one tensor.

    Pairs are compared over every sign pattern ``u_i -> s_i u_i`` with
    ``lam -> prod(s) lam``; the all-minus pattern is the classical
    ``((-1)^(d-2) lam, -u)`` equivalence.
    """
    if p.order != q.order:
        return False
    for signs in itertools.product((1, -1), repeat=p.order):
        if abs(p.lam - math.prod(signs) * q.lam) > tol:
            continue
        if all(np.max(np.abs(u - s * v)) <= tol
               for u, v, s in zip(p.vectors, q.vectors, signs)):
            return True
    return False


def dedupe(pairs, tol=CLASS_TOL, key=same_class):
    """Collapse pairs into classes, keeping the first (lowest-residual if
    sorted that way) representative of each."""
    classes = []
    for p in pairs:
        if not any(key(p, c, tol) for c in classes):
            classes.append(p)
    return classes


@dataclass
class ApproxResult:
    """Best rank-one approximation ``scale * u_1 x ... x u_d``.

    ``classes`` lists one representative per distinct class attaining the
    best value; more than one means the best approximation is not unique.
    """
    scale: float
    vectors: tuple
    value: float
    residual: float
    classes: list
    pairs: list = field(default_factory=list, repr=False)
    failures: int = 0

    @property
    def n_tied(self):
        return len(self.classes)

    def tensor(self):
        return self.scale * outer(self.vectors)

    def pair(self):
        return self.classes[0]


def _scale(A):
    return max(1.0, hs_norm(A))


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero initial vector")
    return v / n


def _pair_from(A, vecs, **kw):
    vecs = [np.asarray(v, dtype=float) for v in vecs]
    G, lam, res = _systems.singular_residuals(A, [v[None, :] for v in vecs])
    return SingularPair(float(lam[0]), tuple(vecs), float(res[0]), **kw)


def _polish(A, vecs, value):
    """Newton-polish a near-stationary tuple; reject jumps and value losses."""
    U, _ = _systems.polish_singular(A, [v[None, :] for v in vecs], iters=8,
                                    tol=4 * np.finfo(float).eps * max(1.0, hs_norm(A)))
    new = [u[0] for u in U]
    moved = max(np.max(np.abs(a - b)) for a, b in zip(new, vecs))
    new_value = float(rayleigh(A, new))
    if moved > _POLISH_STEP_MAX or new_value < value - 1e-9 * max(1.0, abs(value)):
        return vecs
    return new


def hopm(T, init, tol=1e-12, max_sweeps=500, polish=True, strict=False):
    """Higher-order power method for the best rank-one approximation.

    Each sweep replaces ``u_i`` by the normalized contraction
    ``<T, ..u_i-hat..>``, which can only increase the Rayleigh value.

    Parameters
    ----------
    T : array_like
        Nonzero float tensor.
    init : sequence of d vectors
        Starting vectors (normalized internally).
    tol : float
        Stops when the residual is ``<= tol * max(1, ||T||)`` or the value
        changes by ``<= tol * max(1, |value|)`` over a sweep.
    max_sweeps : int
    polish : bool
        Finish with Newton steps on the singular-pair system.
    strict : bool
        Raise :class:`ConvergenceError` instead of returning a flagged pair.

    Returns
    -------
    SingularPair
        ``converged`` is False when the final residual exceeds the tolerance.
    """
    A = asarray(T).astype(float)
    d = A.ndim
    if hs_norm(A) == 0:
        raise ValueError("hopm needs a nonzero tensor")
    scale = _scale(A)
    vecs = [_unit(v) for v in init]
    if len(vecs) != d:
        raise ValueError(f"need {d} initial vectors, got {len(vecs)}")
    history = [abs(float(rayleigh(A, vecs)))]
    value = history[0]
    tiny = 1e-300 + 1e-14 * scale
    sweeps = 0
    res = np.inf
    for sweeps in range(1, max_sweeps + 1):
        for i in range(d):
            g = contract_except(A, i, vecs[:i] + vecs[i + 1:])
            ng = float(np.linalg.norm(g))
            if ng <= tiny:
                raise DegenerateContraction(f"contraction for mode {i} vanished")
            vecs[i] = g / ng
        prev, value = value, ng
        history.append(value)
        _, _, r = _systems.singular_residuals(A, [v[None, :] for v in vecs])
        res = float(r[0])
        if res <= tol * scale or abs(value - prev) <= tol * max(1.0, abs(value)):
            break
    if polish and res > tol * scale:
        vecs = _polish(A, vecs, value)
    pair = _pair_from(A, vecs, sweeps=sweeps, history=history)
    pair.converged = pair.residual <= tol * scale
    if strict and not pair.converged:
        raise ConvergenceError(f"hopm residual {pair.residual:.3e} after {sweeps} sweeps", pair)
    return pair


def hosvd_init(T):
    """Dominant left singular vector of every mode unfolding."""
    A = asarray(T).astype(float)
    out = []
    for i in range(A.ndim):
        M = np.moveaxis(A, i, 0).reshape(A.shape[i], -1)
        U, _, _ = np.linalg.svd(M, full_matrices=False)
        out.append(U[:, 0] * _lead_sign(U[:, 0]))
    return out


def random_init(shape, rng):
    """Independent uniform draws from each unit sphere."""
    return [_unit(rng.standard_normal(n)) for n in shape]


def _restart_rng(seed, k):
    return np.random.default_rng([int(seed), int(k)])


def _run_restart(A, k, seed, tol, max_sweeps):
    rng = _restart_rng(seed, k)
    init = hosvd_init(A) if k == 0 else random_init(A.shape, rng)
    try:
        return hopm(A, init, tol=tol, max_sweeps=max_sweeps)
    except DegenerateContraction:
        pass
    try:
        return hopm(A, random_init(A.shape, rng), tol=tol, max_sweeps=max_sweeps)
    except DegenerateContraction:
        return None


def best_rank_one(T, restarts=32, seed=0, tol=1e-12, max_sweeps=500, workers=None):
    """Best rank-one approximation by multistart HOPM.

    Restart 0 starts from :func:`hosvd_init`; restart ``k >= 1`` draws its
    start from a generator seeded with ``(seed, k)``, so the outcome does not
    depend on the order in which restarts run.

    Returns
    -------
    ApproxResult
        The largest ``|value|`` over all restarts and the distinct classes
        within :data:`CLASS_TOL` of it.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    A = asarray(T).astype(float)
    if hs_norm(A) == 0:
        raise ValueError("the zero tensor has no best rank-one approximation")
    runs = pmap(lambda k: _run_restart(A, k, seed, tol, max_sweeps), range(restarts), workers)
    failures = sum(r is None for r in runs)
    pairs = [r.canonical() for r in runs if r is not None]
    if not pairs:
        raise ConvergenceError("every restart hit a degenerate contraction")
    ok = [p for p in pairs if p.converged] or pairs
    best = max(abs(p.lam) for p in ok)
    tied = [p for p in ok if abs(p.lam) >= best - CLASS_TOL]
    tied.sort(key=lambda p: (-abs(p.lam), p.residual))
    classes = dedupe(tied)
    top = classes[0]
    return ApproxResult(
        scale=top.lam, vectors=top.vectors, value=top.lam,
        residual=_approx_residual(A, top.lam, top.vectors),
        classes=classes, pairs=pairs, failures=failures)


def _approx_residual(A, lam, vecs):
    return hs_norm(A - lam * outer(vecs))


def nonneg_best_rank_one(T, restarts=32, seed=0, tol=1e-12, max_sweeps=500, workers=None):
    """Best rank-one approximation of a nonnegative tensor with nonnegative
    factors.

    Takes entrywise absolute values of the unconstrained optimizer and
    re-polishes; the flip cannot lower the Rayleigh value on a nonnegative
    tensor, so nothing is lost against :func:`best_rank_one`.
    """
    A = asarray(T).astype(float)
    if np.any(A < 0):
        raise ValueError("tensor has a negative entry")
    res = best_rank_one(A, restarts, seed, tol, max_sweeps, workers)
    classes = []
    for c in res.classes:
        classes.append(_nonneg_repolish(A, c, tol, max_sweeps))
    classes.sort(key=lambda p: -p.lam)
    classes = dedupe(classes)
    top = classes[0]
    return ApproxResult(
        scale=top.lam, vectors=top.vectors, value=top.lam,
        residual=_approx_residual(A, top.lam, top.vectors),
        classes=classes, pairs=res.pairs, failures=res.failures)


def _nonneg_repolish(A, pair, tol, max_sweeps):
    start = [np.abs(u) for u in pair.vectors]
    try:
        p = hopm(A, start, tol=tol, max_sweeps=max_sweeps)
        vecs = [np.abs(u) for u in p.vectors]
    except DegenerateContraction:
        vecs = start
    vecs = [v / np.linalg.norm(v) for v in vecs]
    out = _pair_from(A, vecs, sweeps=pair.sweeps)
    out.converged = out.residual <= tol * _scale(A)
    return out


def perron_fixed_point(T, tol=1e-10, max_iters=10000, damping=0.5):
    """Positive normalized singular pair of a strictly positive tensor.

    Iterates the map ``(u_1..u_d) -> (g_1..g_d) / sum_i ||g_i||_1`` with
    ``g_i = <T, ..u_i-hat..>`` on the l1 simplex (damped to suppress
    period-two oscillation). At a fixed point every ``u_i`` has the same l2
    norm, so rescaling each to unit length gives a normalized singular pair
    with ``lam = <T, u_1 x ... x u_d>``. Positivity-preserving power sweeps
    and Newton steps then drive the residual below ``tol``.
    """
    A = asarray(T).astype(float)
    if np.any(A <= 0):
        raise ValueError("perron_fixed_point needs a strictly positive tensor")
    d = A.ndim
    vecs = [np.full(n, 1.0 / (n * d)) for n in A.shape]
    l1_lam = 0.0
    it = 0
    for it in range(1, max_iters + 1):
        G = [contract_except(A, i, vecs[:i] + vecs[i + 1:]) for i in range(d)]
        l1_lam = sum(float(np.sum(g)) for g in G)
        target = [g / l1_lam for g in G]
        change = max(float(np.max(np.abs(t - v))) for t, v in zip(target, vecs))
        vecs = [(1 - damping) * v + damping * t for v, t in zip(vecs, target)]
        if change <= tol:
            break
    unit = [v / np.linalg.norm(v) for v in vecs]
    scale = _scale(A)
    pair = _pair_from(A, unit)
    if pair.residual > tol:
        try:
            p = hopm(A, unit, tol=min(tol, 1e-12), max_sweeps=max_iters, polish=False)
            if all(np.all(u > 0) for u in p.vectors):
                unit = list(p.vectors)
        except DegenerateContraction:
            pass
        pol = _polish(A, unit, float(rayleigh(A, unit)))
        if all(np.all(u > 0) for u in pol):
            unit = pol
        pair = _pair_from(A, unit)
    pair.sweeps = it
    pair.info = {"l1_lambda": l1_lam, "fixed_point_iterations": it}
    pair.converged = pair.residual <= tol and pair.lam > 0
    if not pair.converged:
        raise ConvergenceError(
            f"positive singular pair residual {pair.residual:.3e} exceeds {tol:g} "
            f"(scale {scale:.3g})", pair)
    return pair


def kkt_check_rank_one(T, pair):
    """Largest violation ``max_i ||<T, ..u_i-hat..> - lam u_i||`` of the
    stationarity equations, using ``pair.lam`` as given."""
    A = asarray(T)
    vecs = [np.asarray(u) for u in pair.vectors]
    if len(vecs) != A.ndim:
        raise ValueError(f"pair has {len(vecs)} vectors for a {A.ndim}-way tensor")
    worst = 0.0
    for i in range(A.ndim):
        g = contract_except(A, i, vecs[:i] + vecs[i + 1:])
        worst = max(worst, float(np.linalg.norm((g - pair.lam * vecs[i]).astype(float))))
    return worst

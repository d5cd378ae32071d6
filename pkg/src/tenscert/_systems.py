"""Batched multilinear contractions and Newton steps for the singular-pair and
eigenpair systems. Arrays carry a leading batch axis ``Z`` so that many
seeds are polished in one vectorized pass.
"""
import string

import numpy as np

_LETTERS = string.ascii_lowercase
# path search costs more than it saves on tiny tensors
_OPTIMIZE_MIN = 512


def _subs(d):
    return _LETTERS[:d]


def batch_contract(T, U, keep):
    """Contract ``T`` with batched vectors ``U[k]`` (shape (Z, n_k)) on every
    mode not in ``keep``. Returns shape (Z, *[n_k for k in keep])."""
    d = T.ndim
    if len(keep) == d:
        Z = U[0].shape[0]
        return np.broadcast_to(np.transpose(T, keep), (Z,) + tuple(T.shape[k] for k in keep))
    idx = _subs(d)
    ops = [T]
    terms = [idx]
    for k in range(d):
        if k not in keep:
            ops.append(U[k])
            terms.append("Z" + idx[k])
    out = "Z" + "".join(idx[k] for k in keep)
    return np.einsum(",".join(terms) + "->" + out, *ops, optimize=T.size > _OPTIMIZE_MIN)


def _newton_solve(J, F):
    """Batched ``J x = F``; falls back to the pseudo-inverse when some
    Jacobian in the batch is singular."""
    try:
        return np.linalg.solve(J, F[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.einsum("Zab,Zb->Za", np.linalg.pinv(J, rcond=1e-13), F)


def singular_residuals(T, U):
    """Mode-wise contractions, values and residuals for batched tuples.

    Returns ``(G, lam, res)`` with ``G[i]`` of shape (Z, n_i), the Rayleigh
    value ``lam`` (Z,) and ``res`` (Z,) = max_i ||G_i - lam u_i||.
    """
    d = T.ndim
    G = [batch_contract(T, U, (i,)) for i in range(d)]
    lam = np.einsum("Za,Za->Z", G[0], U[0])
    res = np.max(np.stack([np.linalg.norm(G[i] - lam[:, None] * U[i], axis=1)
                           for i in range(d)]), axis=0)
    return G, lam, res


def singular_newton_step(T, U):
    """One Newton step on ``<T, ..u_i-hat..> = lam_i u_i``, ``<u_i,u_i> = 1``.

    Uses one multiplier per mode so the system is square; all multipliers
    agree at a solution. The linear solve is a batched pseudo-inverse, which
    stays defined where the Jacobian is singular. Returns renormalized vectors.
    """
    d = T.ndim
    dims = T.shape
    Z = U[0].shape[0]
    off = np.concatenate([[0], np.cumsum(dims)])
    N = int(off[-1])
    G = [batch_contract(T, U, (i,)) for i in range(d)]
    lams = [np.einsum("Za,Za->Z", G[i], U[i]) for i in range(d)]
    J = np.zeros((Z, N + d, N + d))
    F = np.zeros((Z, N + d))
    for i in range(d):
        si = slice(off[i], off[i + 1])
        F[:, si] = G[i] - lams[i][:, None] * U[i]
        F[:, N + i] = 0.5 * (np.einsum("Za,Za->Z", U[i], U[i]) - 1.0)
        J[:, si, si] = -lams[i][:, None, None] * np.eye(dims[i])
        J[:, si, N + i] = -U[i]
        J[:, N + i, si] = U[i]
        for j in range(d):
            if j == i:
                continue
            M = batch_contract(T, U, (i, j) if i < j else (j, i))
            if i > j:
                M = np.swapaxes(M, 1, 2)
            J[:, si, off[j]:off[j + 1]] = M
    step = -_newton_solve(J, F)
    out = []
    for i in range(d):
        v = U[i] + step[:, off[i]:off[i + 1]]
        nrm = np.linalg.norm(v, axis=1, keepdims=True)
        out.append(v / np.where(nrm > 0, nrm, 1.0))
    return out


def polish_singular(T, U, iters=30, tol=0.0):
    """Run batched Newton steps, keeping per seed the lowest-residual iterate."""
    U = [np.array(u, dtype=float) for u in U]
    _, _, best_res = singular_residuals(T, U)
    best = [u.copy() for u in U]
    for _ in range(iters):
        U = singular_newton_step(T, U)
        _, _, res = singular_residuals(T, U)
        better = res < best_res
        for i in range(T.ndim):
            best[i][better] = U[i][better]
        best_res = np.where(better, res, best_res)
        if np.all(best_res <= tol):
            break
    return best, best_res


def eigen_residuals(T, u):
    d = T.ndim
    U = [u] * d
    g = batch_contract(T, U, (0,))
    lam = np.einsum("Za,Za->Z", g, u)
    res = np.linalg.norm(g - lam[:, None] * u, axis=1)
    return g, lam, res


def eigen_newton_step(T, u):
    """Newton step on ``<T, u^(d-1)> = lam u``, ``<u,u> = 1`` (symmetric T)."""
    d = T.ndim
    n = T.shape[0]
    Z = u.shape[0]
    U = [u] * d
    g = batch_contract(T, U, (0,))
    lam = np.einsum("Za,Za->Z", g, u)
    M = batch_contract(T, U, (0, 1))
    J = np.zeros((Z, n + 1, n + 1))
    F = np.zeros((Z, n + 1))
    F[:, :n] = g - lam[:, None] * u
    F[:, n] = 0.5 * (np.einsum("Za,Za->Z", u, u) - 1.0)
    J[:, :n, :n] = (d - 1) * M - lam[:, None, None] * np.eye(n)
    J[:, :n, n] = -u
    J[:, n, :n] = u
    step = -_newton_solve(J, F)
    v = u + step[:, :n]
    nrm = np.linalg.norm(v, axis=1, keepdims=True)
    return v / np.where(nrm > 0, nrm, 1.0)


def polish_eigen(T, u, iters=30, tol=0.0):
    u = np.array(u, dtype=float)
    _, _, best_res = eigen_residuals(T, u)
    best = u.copy()
    for _ in range(iters):
        u = eigen_newton_step(T, u)
        _, _, res = eigen_residuals(T, u)
        better = res < best_res
        best[better] = u[better]
        best_res = np.where(better, res, best_res)
        if np.all(best_res <= tol):
            break
    return best, best_res

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from tenscert.rankone import (ConvergenceError, DegenerateContraction, SingularPair,
                              best_rank_one, hopm, kkt_check_rank_one, nonneg_best_rank_one,
                              perron_fixed_point, same_class)
from tenscert.tensor import DenseTensor, SymTensor, contract_except, hs_norm, outer, rayleigh

e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
r2 = 1 / math.sqrt(2)


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def fibonacci_sphere(n):
    k = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * k / n)
    theta = np.pi * (1 + 5 ** 0.5) * k
    return np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], 1)


def grid_spectral_norm(T, n=700):
    """max |<T, u, v, w>| by a grid over u, v (w in closed form), then a
    derivative-free polish in spherical angles."""
    P = fibonacci_sphere(n)
    M = np.einsum("abc,ia,jb->ijc", T, P, P)
    vals = np.linalg.norm(M, axis=2)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)

    def to_vec(t, p):
        return np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])

    def angles(v):
        return [math.acos(np.clip(v[2], -1, 1)), math.atan2(v[1], v[0])]

    def f(z):
        u, v = to_vec(*z[:2]), to_vec(*z[2:])
        return -np.linalg.norm(np.einsum("abc,a,b->c", T, u, v))

    z0 = angles(P[i]) + angles(P[j])
    out = minimize(f, z0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14,
                                                           "maxiter": 20000})
    return -out.fun


def test_hopm_rank_one_input():
    rng = np.random.default_rng(0)
    u, v, w = (unit(rng.standard_normal(n)) for n in (2, 3, 4))
    T = 2 * outer([u, v, w])
    p = hopm(T, [unit(u + 0.3), unit(v + 0.3), unit(w + 0.3)])
    assert p.lam == pytest.approx(2, abs=1e-12) or p.lam == pytest.approx(-2, abs=1e-12)
    ref = SingularPair(2.0, (u, v, w), 0.0)
    assert same_class(p, ref, 1e-9)


def test_hopm_S_near_e1(S):
    p = hopm(S, [unit([1, 0.1])] * 3)
    assert p.lam == pytest.approx(1, abs=1e-12)
    for u in p.vectors:
        np.testing.assert_allclose(u, e1, atol=1e-12)


def test_hopm_matrix():
    p = hopm(np.diag([2.0, 1.0]), [unit([0.3, 0.9]), unit([0.8, -0.2])])
    assert abs(p.lam) == pytest.approx(2, abs=1e-12)
    assert same_class(p, SingularPair(2.0, (e1, e1), 0.0), 1e-9)


def test_hopm_monotone_history():
    rng = np.random.default_rng(1)
    for _ in range(20):
        T = rng.standard_normal((3, 3, 3))
        p = hopm(T, [unit(rng.standard_normal(3)) for _ in range(3)], polish=False)
        h = np.asarray(p.history)
        assert np.all(np.diff(h) >= -1e-13 * max(1, h.max()))
        assert p.residual <= 1e-12 * max(1.0, hs_norm(T)) or not p.converged


def test_hopm_degenerate_and_strict():
    T = outer([e1, e1, e1])
    with pytest.raises(DegenerateContraction):
        hopm(T, [e2, e2, e2])
    rng = np.random.default_rng(2)
    T = rng.standard_normal((3, 3, 3))
    with pytest.raises(ConvergenceError) as info:
        hopm(T, [unit(rng.standard_normal(3)) for _ in range(3)], max_sweeps=1,
             polish=False, strict=True)
    assert info.value.result is not None
    flagged = hopm(T, [unit(rng.standard_normal(3)) for _ in range(3)], max_sweeps=1,
                   polish=False)
    assert not flagged.converged


def test_hopm_rejects_zero_tensor():
    with pytest.raises(ValueError):
        hopm(np.zeros((2, 2)), [e1, e1])


@pytest.mark.parametrize("fixture", ["S", "T_general"])
def test_best_rank_one_ties(S, fixture):
    # the general fixture is the same entries stored without the symmetric flag
    T = SymTensor(S) if fixture == "S" else DenseTensor(S)
    res = best_rank_one(T, restarts=100, seed=0)
    assert res.value == pytest.approx(1, abs=1e-8)
    assert res.n_tied == 2
    for e in (e1, e2):
        assert any(same_class(c, SingularPair(1.0, (e, e, e), 0.0)) for c in res.classes)


def test_best_rank_one_grid_oracle():
    T = np.random.default_rng(3).standard_normal((3, 3, 3))
    res = best_rank_one(T, restarts=32, seed=0)
    # frozen output of grid_spectral_norm(T)
    assert res.value == pytest.approx(4.578924115346881, abs=1e-6)


def test_grid_oracle_reproduces_frozen_value():
    T = np.random.default_rng(3).standard_normal((3, 3, 3))
    assert grid_spectral_norm(T) == pytest.approx(4.578924115346881, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_matrix_reduction_svd_oracle(seed):
    A = np.random.default_rng(seed).standard_normal((3, 4))
    res = best_rank_one(A, restarts=8, seed=seed)
    assert res.value == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], abs=1e-10)


def test_approx_result_residual_identity():
    rng = np.random.default_rng(4)
    for shape in [(2, 2, 2), (3, 2, 4), (2, 2, 2, 2)]:
        T = rng.standard_normal(shape)
        res = best_rank_one(T, restarts=8, seed=1)
        assert res.residual ** 2 == pytest.approx(hs_norm(T) ** 2 - res.value ** 2, rel=1e-10)
        assert hs_norm(T - res.tensor()) == pytest.approx(res.residual, rel=1e-10)
        for u in res.vectors:
            assert np.linalg.norm(u) == pytest.approx(1, abs=1e-12)


def test_best_rank_one_determinism_across_workers():
    T = np.random.default_rng(5).standard_normal((3, 3, 3))
    a = best_rank_one(T, restarts=12, seed=9, workers=1)
    b = best_rank_one(T, restarts=12, seed=9, workers=4)
    assert a.value == b.value
    assert all(np.array_equal(u, v) for u, v in zip(a.vectors, b.vectors))
    assert [c.lam for c in a.classes] == [c.lam for c in b.classes]


def test_best_rank_one_rejects():
    with pytest.raises(ValueError):
        best_rank_one(np.zeros((2, 2)), restarts=4)
    with pytest.raises(ValueError):
        best_rank_one(np.ones((2, 2)), restarts=0)


@pytest.mark.parametrize("d", [3, 4])
def test_equivalence_closure(d):
    rng = np.random.default_rng(d)
    T = rng.standard_normal((2,) * d)
    p = best_rank_one(T, restarts=4, seed=0).pair()
    q = SingularPair((-1) ** (d - 2) * p.lam, tuple(-u for u in p.vectors), 0.0)
    assert kkt_check_rank_one(T, q) == pytest.approx(kkt_check_rank_one(T, p), abs=1e-15)
    assert same_class(p, q)


def test_nonneg_examples(S):
    T = outer([np.array([1.0, 2.0]), np.array([3.0, 1.0])])
    res = nonneg_best_rank_one(T, restarts=4)
    assert res.residual == pytest.approx(0, abs=1e-12)
    np.testing.assert_allclose(res.tensor(), T, atol=1e-12)
    res = nonneg_best_rank_one(S, restarts=16)
    assert res.value == pytest.approx(1, abs=1e-10)
    assert all(np.all(u >= 0) for u in res.vectors)
    with pytest.raises(ValueError):
        nonneg_best_rank_one(-S)


def test_nonneg_no_gap_small_suite():
    rng = np.random.default_rng(6)
    for k in range(20):
        T = rng.random((2, 2, 2) if k % 2 else (3, 3, 2))
        a = nonneg_best_rank_one(T, restarts=16, seed=k)
        b = best_rank_one(T, restarts=16, seed=k)
        assert abs(a.value - b.value) <= 1e-8


nonneg = arrays(float, (2, 3, 2), elements=st.floats(0, 5, allow_nan=False))
vec = st.floats(-3, 3, allow_nan=False)


@given(nonneg, st.lists(vec, min_size=7, max_size=7))
def test_abs_flip_never_decreases_value(T, xs):
    vecs = [np.array(xs[:2]), np.array(xs[2:5]), np.array(xs[5:])]
    assert rayleigh(T, [np.abs(v) for v in vecs]) >= rayleigh(T, vecs) - 1e-9


def test_perron_examples():
    p = perron_fixed_point(np.ones((2, 2, 2)))
    assert p.lam == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    for u in p.vectors:
        np.testing.assert_allclose(u, [r2, r2], atol=1e-12)
    rng = np.random.default_rng(7)
    u, v, w = (unit(rng.random(n) + 0.1) for n in (2, 3, 2))
    p = perron_fixed_point(3.5 * outer([u, v, w]))
    assert p.lam == pytest.approx(3.5, abs=1e-10)
    for a, b in zip(p.vectors, (u, v, w)):
        np.testing.assert_allclose(a, b, atol=1e-10)
    p = perron_fixed_point(np.full((1, 1, 1), 0.7))
    assert p.lam == pytest.approx(0.7)
    assert all(np.array_equal(x, [1.0]) for x in p.vectors)


def test_perron_rejects_nonpositive(S):
    with pytest.raises(ValueError):
        perron_fixed_point(S)


def test_perron_positive_margin():
    rng = np.random.default_rng(8)
    for _ in range(10):
        T = rng.random((3, 2, 3)) + 1e-3
        p = perron_fixed_point(T)
        assert p.lam > 0
        assert min(u.min() for u in p.vectors) > 1e-6
        assert kkt_check_rank_one(T, p) <= 1e-10


def test_kkt_check_examples(S):
    assert kkt_check_rank_one(np.diag([2.0, 1.0]), SingularPair(2.0, (e1, e1), 0)) == 0
    assert kkt_check_rank_one(S, SingularPair(1.0, (e1, e1, e1), 0)) == 0
    u = np.array([r2, r2])
    assert kkt_check_rank_one(S, SingularPair(r2, (u, u, u), 0)) == pytest.approx(0, abs=1e-15)
    assert kkt_check_rank_one(S, SingularPair(1.0, (u, u, u), 0)) == pytest.approx(1 - r2)
    with pytest.raises(ValueError):
        kkt_check_rank_one(S, SingularPair(1.0, (e1, e1), 0))
    np.testing.assert_allclose(contract_except(S, 0, [u, u]), [0.5, 0.5])

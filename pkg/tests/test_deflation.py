import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsepca import (MackeyState, covariance_projection_deflate, mackey_deflate,
                       projection_deflate)
from sparsepca.deflation import orthogonalize_left
from sparsepca.errors import InvalidInput, ShapeError


def _unit(v):
    return v / np.linalg.norm(v)


def _correlated_loadings(rng, M, k):
    base = rng.standard_normal(M)
    return [_unit(base + 0.6 * rng.standard_normal(M)) for _ in range(k)]


def test_projection_annihilates_leading_direction(rng):
    X = rng.standard_normal((6, 5))
    v = np.linalg.svd(X)[2][0]
    Xd = projection_deflate(X, v)
    assert np.linalg.norm(Xd @ v) <= 1e-10
    np.testing.assert_allclose(projection_deflate(Xd, v), Xd, atol=1e-14)


def test_projection_rank_two_spectrum(rng):
    X = rng.standard_normal((7, 2)) @ rng.standard_normal((2, 6))
    s = np.linalg.svd(X, compute_uv=False)
    Xd = projection_deflate(X, np.linalg.svd(X)[2][0])
    assert np.linalg.svd(Xd, compute_uv=False)[0] == pytest.approx(s[1], abs=1e-9)


def test_projection_normalizes_and_validates(rng):
    X = rng.standard_normal((3, 4))
    p = rng.standard_normal(4)
    np.testing.assert_allclose(projection_deflate(X, 5 * p), projection_deflate(X, p))
    with pytest.raises(InvalidInput):
        projection_deflate(X, np.zeros(4))
    with pytest.raises(ShapeError):
        projection_deflate(X, np.ones(3))


def test_projection_double_counting_counterexample(rng):
    # with correlated loadings, later projections re-introduce the first direction
    X = rng.standard_normal((10, 8))
    ps = _correlated_loadings(rng, 8, 3)
    Xa = X
    for p in ps:
        Xa = projection_deflate(Xa, p)
    assert np.linalg.norm(Xa @ ps[0]) > 1e-3


def test_covariance_form_matches_data_form(rng):
    X = rng.standard_normal((9, 5))
    p = _unit(rng.standard_normal(5))
    Xd = projection_deflate(X, p)
    np.testing.assert_allclose(covariance_projection_deflate(X.T @ X, p), Xd.T @ Xd, atol=1e-9)


def test_covariance_eigen_annihilation(rng):
    B = rng.standard_normal((5, 5))
    C = B @ B.T
    w, V = np.linalg.eigh(C)
    Cn = covariance_projection_deflate(C, V[:, 2])
    expected = np.sort(np.where(np.arange(5) == 2, 0.0, w))
    np.testing.assert_allclose(np.linalg.eigvalsh(Cn), expected, atol=1e-9)


def test_covariance_null_direction_and_checks():
    C = np.diag([2.0, 1.0, 0.0])
    np.testing.assert_allclose(covariance_projection_deflate(C, np.array([0, 0, 1.0])), C)
    with pytest.raises(InvalidInput):
        covariance_projection_deflate(np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([1.0, 0]))


def test_mackey_first_call_is_projection(rng):
    X = rng.standard_normal((5, 4))
    p = _unit(rng.standard_normal(4))
    Xm, state, q = mackey_deflate(X, MackeyState.initial(4), p)
    np.testing.assert_allclose(q, p)
    np.testing.assert_allclose(Xm, projection_deflate(X, p))
    X2, state2, q2 = mackey_deflate(Xm, state, p)
    assert not np.any(q2) and state2.degenerate == [1]
    np.testing.assert_array_equal(X2, Xm)
    assert state2.calls == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_mackey_orthonormal_and_annihilating(seed, k):
    rng = np.random.default_rng(seed)
    M = 8
    X = rng.standard_normal((10, M))
    ps = _correlated_loadings(rng, M, k)
    state = MackeyState.initial(M)
    Xa = X
    qs = []
    for p in ps:
        Xa, state, q = mackey_deflate(Xa, state, p)
        qs.append(q)
    Q = np.column_stack(qs)
    np.testing.assert_allclose(Q.T @ Q, np.eye(k), atol=1e-9)
    assert np.abs(Xa @ Q).max() <= 1e-9
    # oracle: classical Gram-Schmidt on the same sequence
    G = np.linalg.qr(np.column_stack(ps))[0]
    np.testing.assert_allclose(np.abs(np.sum(G * Q, axis=0)), 1.0, atol=1e-9)


def test_orthogonalize_left(rng):
    X = rng.standard_normal((6, 3))
    u = rng.standard_normal(6)
    assert np.linalg.norm(_unit(u) @ orthogonalize_left(X, u)) < 1e-12

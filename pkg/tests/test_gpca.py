import numpy as np
import pytest

from sparsepca import correlation_map, find_groups, fit_gpca, macs, residuals
from sparsepca.errors import InvalidInput, RankExhausted
from sparsepca.gpca import group_candidates


def test_proportional_columns_fully_correlated(rng):
    x = rng.standard_normal(8)
    X = np.column_stack([x, -2.5 * x, rng.standard_normal(8)])
    C = correlation_map(X).matrix
    assert C[0, 1] == pytest.approx(-1.0)
    assert C[1, 0] == C[0, 1]
    np.testing.assert_array_equal(np.diag(C), 1.0)


def test_orthogonal_spectra_block_structure(ortho):
    C = np.abs(correlation_map(ortho.X).matrix)
    np.testing.assert_allclose(C[:10, :10], 1.0, atol=1e-12)
    np.testing.assert_allclose(C[10:, 10:], 1.0, atol=1e-12)
    np.testing.assert_allclose(C[:10, 10:], 0.0, atol=1e-12)


def test_independent_columns_weakly_correlated():
    X = np.random.default_rng(5).standard_normal((500, 10))
    for center in (False, True):
        C = correlation_map(X, center=center).matrix
        off = C[~np.eye(10, dtype=bool)]
        assert np.abs(off).max() < 0.15


def test_centered_map_is_pearson(rng):
    X = rng.standard_normal((30, 4)) + 3.0
    np.testing.assert_allclose(correlation_map(X, center=True).matrix, np.corrcoef(X.T),
                               atol=1e-12)


def test_zero_column_flagged():
    X = np.array([[1.0, 0.0, 2.0], [2.0, 0.0, 1.0]])
    cm = correlation_map(X)
    assert cm.degenerate == [1]
    assert cm.matrix[0, 1] == 0 and cm.matrix[1, 1] == 1


def test_groups_threshold_cases(ortho):
    groups = find_groups(correlation_map(ortho.X), 0.999)
    assert [g.tolist() for g in groups] == [list(range(10)), list(range(10, 20))]
    dense = np.full((5, 5), 0.5)
    assert [g.tolist() for g in find_groups(dense, 0.1)] == [list(range(5))]
    assert [g.tolist() for g in find_groups(np.eye(4), 0.5)] == [[0], [1], [2], [3]]
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(InvalidInput):
            find_groups(np.eye(3), bad)


def test_group_candidates_are_group_svd(rng):
    X = rng.standard_normal((6, 9))
    groups = [np.array([0, 2, 4]), np.arange(9)]
    Pc, var = group_candidates(X, groups)
    for g, idx in enumerate(groups):
        s = np.linalg.svd(X[:, idx], compute_uv=False)
        assert var[g] == pytest.approx(s[0] ** 2)
        assert np.all(Pc[np.setdiff1d(np.arange(9), idx), g] == 0)


@pytest.mark.parametrize("deflation", ["projection", "mackey", "orthogonalized"])
def test_orthogonal_spectra_recovery(ortho, deflation):
    m = fit_gpca(ortho.X, 2, gamma=0.5, deflation=deflation)
    truth = ortho.P_true / np.linalg.norm(ortho.P_true, axis=0)
    for a in range(2):
        assert np.max(np.abs(np.abs(truth.T @ m.P[:, a]) - 1).min()) < 1e-10
    assert np.linalg.norm(residuals(ortho.X, m.T, m.P)) <= 1e-8


def test_nonorthogonal_spectra(nonortho):
    X = nonortho.X
    pd = fit_gpca(X, 3, gamma=0.8675, deflation="projection")
    mk = fit_gpca(X, 3, gamma=0.8675, deflation="mackey")
    og = fit_gpca(X, 3, gamma=0.8675, deflation="orthogonalized")
    assert abs(macs(pd.T) - 0.52) < 0.15 and abs(macs(mk.T) - 0.52) < 0.15
    assert macs(og.T) <= 1e-9
    # loadings here have disjoint supports, so both deflations coincide
    np.testing.assert_allclose(pd.P, mk.P, atol=1e-12)


def test_rank_exhausted(ortho):
    with pytest.raises(RankExhausted):
        fit_gpca(ortho.X, 3, gamma=0.5, deflation="orthogonalized")


def test_recompute_groups_option(nonortho):
    m = fit_gpca(nonortho.X, 3, gamma=0.8675, recompute_groups=True)
    assert m.info["n_groups"] >= 1 and len(m.info["groups"]) == 3

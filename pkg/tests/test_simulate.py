import math

import numpy as np
import pytest

from sparsepca import calibrate_sparsity, gen_montecarlo, macl, macs
from sparsepca.methods import KNOB, fit_method, knob_from_level
from sparsepca.errors import InvalidInput
from sparsepca.pca import METHODS, SPARSE_METHODS


def test_orthogonal_spectra_layout(ortho):
    assert ortho.shape == (5, 20)
    assert ortho.P_true[:, 0] @ ortho.P_true[:, 1] == 0
    assert ortho.T_true[:, 0] @ ortho.T_true[:, 1] == 0
    assert ortho.X[0, 0] == pytest.approx(0.05)
    assert ortho.nnz_true == 20


def test_nonorthogonal_spectra_layout(nonortho):
    assert round(macs(nonortho.T_true), 2) == 0.43
    assert round(macl(nonortho.P_true), 2) == 0.17
    s = np.linalg.svd(nonortho.X, compute_uv=False)
    assert np.sum(s > 1e-10) == 3
    assert nonortho.nnz_true == 30


def test_montecarlo_deterministic():
    a, b = gen_montecarlo(3), gen_montecarlo(3)
    np.testing.assert_array_equal(a.X, b.X)
    assert not np.array_equal(a.X, gen_montecarlo(4).X)
    assert a.X.shape == (50, 200) and a.P_true.shape == (200, 5)


def test_montecarlo_sparsity_rate():
    expected = 1 - 0.5 * (1 + math.erf(1 / math.sqrt(2)))
    counts = [gen_montecarlo(s).nnz_true for s in range(100)]
    assert 130 <= np.mean(counts) <= 190
    assert abs(np.mean(counts) / 1000 - expected) < 0.02


def test_montecarlo_score_scales_decrease():
    # population column scales halve; check on the pooled sample variances
    var = np.mean([gen_montecarlo(s).T_true.var(axis=0) for s in range(20)], axis=0)
    assert np.all(np.diff(var) < 0)
    np.testing.assert_allclose(var / var[0], 0.25 ** np.arange(5), rtol=0.3)


def test_montecarlo_redraws_empty_column():
    ds = gen_montecarlo(0, N=4, M=3, A=6)
    assert all(np.any(ds.P_true[:, a]) for a in range(6))
    assert ds.flags and all("redrew" in f for f in ds.flags)


def test_knob_levels(nonortho):
    X = nonortho.X
    assert knob_from_level("SPCA", 0.0, X) == 20 and knob_from_level("SPCA", 1.0, X) == 1
    assert knob_from_level("PMD-O", 0.0, X) == pytest.approx(np.sqrt(20))
    assert knob_from_level("PMD-O", 1.0, X) == pytest.approx(1.0)
    assert knob_from_level("GPCA-M", 1.0, X) == pytest.approx(0.99)
    assert knob_from_level("PCA", 0.5, X) is None


def test_knob_endpoints(nonortho):
    X = nonortho.X
    assert fit_method("SPCA-Sq", X, 3, 20).nnz == 60
    assert fit_method("PMD-PD", X, 3, 1.0).nnz == 3
    with pytest.raises(InvalidInput):
        fit_method("NOPE", X, 3)


@pytest.mark.parametrize("method", SPARSE_METHODS)
def test_calibration_hits_target(nonortho, method):
    cal = calibrate_sparsity(method, nonortho.X, 30, 3)
    assert cal.knob == KNOB[method]
    assert abs(cal.nnz - 30) <= 6
    assert cal.model.nnz == cal.nnz
    assert cal.evaluations >= 1


def test_calibration_for_pca(nonortho):
    cal = calibrate_sparsity("PCA", nonortho.X, 30, 3)
    assert cal.knob is None and cal.nnz == 60


def test_all_methods_registered():
    assert set(KNOB) == set(METHODS)

"""Fitted factor models and the plain PCA baseline."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ShapeError
from .numerics import as_matrix, svd

METHODS = ("PCA", "SPCA", "SPCA-Sq", "PMD-PD", "PMD-O", "PMD-M", "GPCA-PD", "GPCA-M", "GPCA-O")
SPARSE_METHODS = METHODS[1:]
ORTHOGONALIZED_METHODS = ("PMD-O", "GPCA-O")
DEFLATIONS = ("none", "projection", "orthogonalized", "mackey", "score")

# entries with smaller magnitude (on unit-norm loadings) count as zero
NNZ_TOL = 1e-10


@dataclass
class FactorModel:
    """
    A fitted factorization ``X ~ T @ P.T``.

    ``T`` holds the "naive" scores, computed one component at a time the way
    the fitting algorithm reports them: ``t_a = X p_a`` for PCA and both SPCA
    solvers, ``t_a = X_{a-1} p_a`` on the deflated data for PMD and GPCA.
    The least-squares scores are obtained with
    :func:`sparsepca.diagnostics.corrected_scores`.

    Attributes
    ----------
    T : ndarray, shape (N, A)
    P : ndarray, shape (M, A)
        Loadings, every column of unit L2 norm.
    Q : ndarray or None, shape (M, A)
        Auxiliary loadings (the Procrustes factor of SPCA or the
        Gram-Schmidt vectors of Mackey deflation).
    method, deflation : str
    score_mode : str
        ``"naive"`` for ``T`` as fitted, ``"corrected"`` after
        :meth:`with_corrected_scores`.
    params : dict
        Metaparameters used for the fit.
    info : dict
        Solver diagnostics (iterations, flags).
    """

    T: np.ndarray
    P: np.ndarray
    Q: Optional[np.ndarray] = None
    method: str = "PCA"
    deflation: str = "none"
    score_mode: str = "naive"
    params: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.T = np.asarray(self.T, dtype=float)
        self.P = np.asarray(self.P, dtype=float)
        if self.T.ndim != 2 or self.P.ndim != 2 or self.T.shape[1] != self.P.shape[1]:
            raise ShapeError(f"T {self.T.shape} and P {self.P.shape} disagree on A")
        if self.Q is not None:
            self.Q = np.asarray(self.Q, dtype=float)
            if self.Q.shape != self.P.shape:
                raise ShapeError(f"Q {self.Q.shape} must match P {self.P.shape}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.deflation not in DEFLATIONS:
            raise ValueError(f"unknown deflation {self.deflation!r}")

    @property
    def n_components(self):
        return self.P.shape[1]

    @property
    def nnz(self):
        return count_nonzero(self.P)

    def with_corrected_scores(self, X):
        """Copy of the model whose ``T`` is the least-squares score matrix for `X`."""
        from .diagnostics import corrected_scores

        return FactorModel(
            T=corrected_scores(X, self.P), P=self.P.copy(),
            Q=None if self.Q is None else self.Q.copy(),
            method=self.method, deflation=self.deflation, score_mode="corrected",
            params=dict(self.params), info=dict(self.info),
        )


def count_nonzero(P, tol=NNZ_TOL):
    """Number of loadings with magnitude above `tol`."""
    return int(np.sum(np.abs(np.asarray(P)) > tol))


def check_components(X, A):
    X = as_matrix(X)
    A = int(A)
    if not 1 <= A <= min(X.shape):
        raise ShapeError(f"A={A} outside [1, {min(X.shape)}] for X of shape {X.shape}")
    return X, A


def fit_pca(X, A):
    """
    PCA of `X` with `A` components, without centering.

    Loadings are the first `A` right singular vectors, scores ``T = X @ P``.
    """
    X, A = check_components(X, A)
    res = svd(X)
    P = res.V[:, :A].copy()
    T = X @ P
    return FactorModel(T=T, P=P, method="PCA", deflation="none",
                       info={"singular_values": res.S.copy()})

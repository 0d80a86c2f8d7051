"""
SPCA as a penalized regression: simultaneous and one-component-at-a-time fits.

Both solvers alternate between a sparse weight matrix ``P`` and an
orthonormal auxiliary matrix ``Q`` for the criterion::

    ||X - X P Q^T||_F^2 + lambda2 sum_a ||p_a||^2 + sum_a lambda1_a ||p_a||_1,
    Q^T Q = I

The P-step uses the closed-form naive elastic net that results when the
quadratic term ``p^T X^T X p`` is replaced by ``||p||^2`` (the large-ridge
limit), so every column update is a soft-thresholding of ``X^T X q_a``::

    p_a = S(X^T X q_a, lambda1_a / 2) / (1 + lambda2)

The Q-step is the orthogonal Procrustes solution ``Q = U W^T`` with
``X^T X P = U D W^T``.

The lasso weights are either fixed (``lambda1``) or chosen afresh at every
P-step so that each column keeps exactly ``nnz`` nonzeros (the threshold
then sits at the ``(nnz+1)``-th largest magnitude of ``X^T X q_a``).
"""

from dataclasses import dataclass

import numpy as np

from .deflation import projection_deflate
from .errors import DegenerateComponent, InvalidInput, ShapeError
from .numerics import as_matrix, leading_singular_triplet, qr, soft_threshold, svd
from .pca import FactorModel, check_components


@dataclass
class SpcaConfig:
    """
    Metaparameters for the SPCA solvers.

    Parameters
    ----------
    lambda1 : float or sequence of float
        Lasso weight per component; a scalar is broadcast to all components.
        Ignored when `nnz` is given.
    lambda2 : float
        Ridge weight.
    max_iter : int
    tol : float
        Stop when the relative Frobenius change of ``P`` falls below this.
    nnz : int or sequence of int, optional
        Number of nonzero loadings to keep per component.
    """

    lambda1: object = 0.0
    lambda2: float = 1e-6
    max_iter: int = 300
    tol: float = 1e-6
    nnz: object = None

    def lambdas(self, A):
        if np.ndim(self.lambda1) == 0:
            lam = np.full(A, float(self.lambda1))
        else:
            lam = np.asarray(self.lambda1, dtype=float)
        if lam.shape != (A,):
            raise InvalidInput(f"lambda1 has length {lam.size}, expected {A}")
        if np.any(lam < 0) or self.lambda2 < 0:
            raise InvalidInput("penalty weights must be nonnegative")
        if self.max_iter < 1 or self.tol < 0:
            raise InvalidInput("max_iter must be >= 1 and tol >= 0")
        return lam

    def cardinalities(self, A, M):
        if self.nnz is None:
            return None
        k = np.broadcast_to(np.asarray(self.nnz, dtype=int), (A,)).copy()
        if np.any(k < 1) or np.any(k > M):
            raise InvalidInput(f"nnz must lie in [1, {M}], got {self.nnz}")
        return k


def cardinality_threshold(z, k):
    """Threshold that leaves the `k` largest magnitudes of `z` nonzero (0 if ``k >= len(z)``)."""
    if k >= z.size:
        return 0.0
    return float(np.partition(np.abs(z), z.size - k - 1)[z.size - k - 1])


def surrogate_objective(G, P, Q, lam1, lambda2):
    """Criterion minimized exactly by the alternating steps (``trace(X^T X)`` omitted)."""
    return (-2.0 * np.sum(Q * (G @ P)) + (1.0 + lambda2) * np.sum(P**2)
            + np.sum(lam1 * np.abs(P).sum(axis=0)))


def spca_objective(X, P, Q, lam1, lambda2):
    """Value of the penalized regression criterion at ``(P, Q)``."""
    R = X - X @ P @ Q.T
    return (np.sum(R**2) + lambda2 * np.sum(P**2)
            + np.sum(np.asarray(lam1) * np.abs(P).sum(axis=0)))


def _procrustes(GP):
    res = svd(GP)
    return res.U @ res.V.T


def _p_step(G, Q, lam1, lambda2, card=None):
    Z = G @ Q
    if card is not None:
        lam1 = 2.0 * np.array([cardinality_threshold(Z[:, a], card[a]) for a in range(Z.shape[1])])
    P = soft_threshold_columns(Z, lam1 / 2.0) / (1.0 + lambda2)
    for a in range(P.shape[1]):
        if not np.any(P[:, a]):
            raise DegenerateComponent(f"loading {a} fully thresholded; lambda1 too large",
                                      component=a)
    return P


def soft_threshold_columns(Z, thresholds):
    """Soft-threshold column ``a`` of `Z` by ``thresholds[a]``."""
    return np.sign(Z) * np.maximum(np.abs(Z) - np.asarray(thresholds)[None, :], 0.0)


def _normalize_columns(P):
    return P / np.linalg.norm(P, axis=0)


def fit_spca_simultaneous(X, A, cfg=None, track_objective=False):
    """
    Fit all `A` components of SPCA jointly.

    ``Q`` is warm-started from the first `A` right singular vectors. After
    convergence the columns of ``P`` are scaled to unit length and ``Q`` is
    recomputed for the normalized ``P``. Scores are ``T = X P``.

    Raises
    ------
    DegenerateComponent
        If soft-thresholding zeroes a whole loading column.
    """
    X, A = check_components(X, A)
    cfg = cfg or SpcaConfig()
    lam1 = cfg.lambdas(A)
    card = cfg.cardinalities(A, X.shape[1])
    G = X.T @ X
    Q = svd(X).V[:, :A].copy()
    P = _p_step(G, Q, lam1, cfg.lambda2, card)
    history = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        Q = _procrustes(G @ P)
        if track_objective:
            history.append(surrogate_objective(G, P, Q, lam1, cfg.lambda2))
        P_new = _p_step(G, Q, lam1, cfg.lambda2, card)
        if track_objective:
            history.append(surrogate_objective(G, P_new, Q, lam1, cfg.lambda2))
        change = np.linalg.norm(P_new - P) / np.linalg.norm(P)
        P = P_new
        if change < cfg.tol:
            converged = True
            break
    P = _normalize_columns(P)
    Q = _procrustes(G @ P)
    info = {"iterations": it, "converged": converged}
    if track_objective:
        info["objective_history"] = history
    return FactorModel(T=X @ P, P=P, Q=Q, method="SPCA", deflation="none",
                       params=_params(cfg, lam1, card), info=info)


def _params(cfg, lam1, card):
    if card is not None:
        return {"nnz": card.tolist(), "lambda2": cfg.lambda2}
    return {"lambda1": lam1.tolist(), "lambda2": cfg.lambda2}


def spca_rank_one(X, lambda1=0.0, lambda2=1e-6, max_iter=300, tol=1e-6, nnz=None,
                  component=0):
    """
    Rank-one version of the alternating scheme on `X`.

    ``q`` starts at the leading right singular vector; each sweep sets
    ``p = S(X^T X q, lambda1 / 2) / (1 + lambda2)`` and ``q = X^T X p / ||X^T X p||``.
    With `nnz` the threshold is re-chosen each sweep to keep `nnz` entries.

    Returns the unit loading ``p``, the unit auxiliary vector ``q`` and the
    number of sweeps.
    """
    G = X.T @ X
    _, s, q = leading_singular_triplet(X)
    if s == 0:
        raise DegenerateComponent("residual matrix is zero", component=component)
    p = None
    it = 0
    for it in range(1, max_iter + 1):
        z = G @ q
        thr = cardinality_threshold(z, nnz) if nnz is not None else lambda1 / 2.0
        p_new = soft_threshold(z, thr) / (1.0 + lambda2)
        if not np.any(p_new):
            raise DegenerateComponent(f"loading {component} fully thresholded; lambda1 too large",
                                      component=component)
        Gp = G @ p_new
        norm = np.linalg.norm(Gp)
        if norm == 0:
            raise DegenerateComponent(f"loading {component} has no variance", component=component)
        q = Gp / norm
        done = p is not None and np.linalg.norm(p_new - p) < tol * np.linalg.norm(p)
        p = p_new
        if done:
            break
    p = p / np.linalg.norm(p)
    Gp = G @ p
    q = Gp / np.linalg.norm(Gp)
    return p, q, it


def fit_spca_sequential(X, A, cfg=None, deflation="score"):
    """
    Fit SPCA one component at a time.

    Component ``a`` solves the rank-one problem on the deflated data
    ``X_{a-1}``. Between components the data are deflated either in score
    space (default), ``X_a = X_{a-1} - t t^T X_{a-1} / (t^T t)`` with
    ``t = X_{a-1} p_a``, or by projection, ``X_a = X_{a-1} (I - p_a p_a^T)``.
    Scores are reported as ``X P``.
    """
    X, A = check_components(X, A)
    if deflation not in ("score", "projection"):
        raise InvalidInput(f"unknown deflation {deflation!r}")
    cfg = cfg or SpcaConfig()
    lam1 = cfg.lambdas(A)
    N, M = X.shape
    card = cfg.cardinalities(A, M)
    P = np.zeros((M, A))
    Q = np.zeros((M, A))
    iters = []
    Xa = X.copy()
    for a in range(A):
        p, q, it = spca_rank_one(Xa, lam1[a], cfg.lambda2, cfg.max_iter, cfg.tol,
                                 nnz=None if card is None else int(card[a]), component=a)
        P[:, a], Q[:, a] = p, q
        iters.append(it)
        if deflation == "score":
            t = Xa @ p
            Xa = Xa - np.outer(t, t @ Xa) / (t @ t)
        else:
            Xa = projection_deflate(Xa, p)
    return FactorModel(T=X @ P, P=P, Q=Q, method="SPCA-Sq", deflation=deflation,
                       params=_params(cfg, lam1, card), info={"iterations": iters})


def qr_variance(T):
    """Sum of squares of the diagonal of ``R`` in the QR factorization of `T`."""
    T = as_matrix(T, "T")
    if T.shape[0] < T.shape[1]:
        raise ShapeError(f"qr_variance needs N >= A, got {T.shape}")
    return float(np.sum(np.diag(qr(T).R) ** 2))

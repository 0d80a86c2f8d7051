"""
Scores, residuals and variance accounting for models with non-orthogonal loadings.

Two score matrices are compared throughout:

naive
    ``T = X P``, or the per-component scores a deflation algorithm produces
corrected
    the least-squares scores ``T = X P (P^T P)^+``, for which ``E P = 0``

and three ways of adding captured and residual variance, each normalized by
``trace(X^T X)``:

========  ==============================================
TotQR     sum of squared diagonal of R in ``T = QR``
TotT      ``trace(T^T T)``
TotPT     ``trace(P T^T T P^T)`` (variance of the reconstruction)
========  ==============================================

Only TotPT with corrected scores is guaranteed to add up to one.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateComponent, InvalidInput, ShapeError
from .numerics import pinv
from .spca import qr_variance


def _conform(X, P=None, T=None):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"X must be 2-D, got ndim={X.ndim}")
    if P is not None:
        P = np.asarray(P, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.shape[0] != X.shape[1]:
            raise ShapeError(f"P has {P.shape[0]} rows, X has {X.shape[1]} columns")
    if T is not None:
        T = np.asarray(T, dtype=float)
        if T.ndim == 1:
            T = T[:, None]
        if T.shape[0] != X.shape[0]:
            raise ShapeError(f"T has {T.shape[0]} rows, X has {X.shape[0]}")
        if P is not None and T.shape[1] != P.shape[1]:
            raise ShapeError(f"T has {T.shape[1]} columns, P has {P.shape[1]}")
    return X, P, T


def naive_scores(X, P):
    """Scores ``X @ P``, valid only for orthonormal loadings."""
    X, P, _ = _conform(X, P)
    return X @ P


def corrected_scores(X, P):
    """Least-squares scores ``X P (P^T P)^+``."""
    X, P, _ = _conform(X, P)
    return X @ P @ pinv(P.T @ P)


def residuals(X, T, P):
    """Residual matrix ``E = X - T P^T``."""
    X, P, T = _conform(X, P, T)
    return X - T @ P.T


def _mean_abs_lower(C):
    A = C.shape[0]
    if A < 2:
        raise ShapeError("correlation statistics need at least two components")
    rows, cols = np.tril_indices(A, k=-1)
    return float(np.mean(np.abs(C[rows, cols])))


def _cosines(Z, what):
    Z = np.asarray(Z, dtype=float)
    norms = np.linalg.norm(Z, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise DegenerateComponent(f"{what} column {zero[0]} is zero", component=int(zero[0]))
    Zn = Z / norms
    return Zn.T @ Zn


def macs(T):
    """
    Mean absolute correlation of the scores.

    Mean of ``|cos(t_i, t_j)|`` over column pairs ``i > j``, computed on the
    raw (uncentered) scores.
    """
    return min(1.0, _mean_abs_lower(_cosines(T, "score")))


def macl(P):
    """Mean absolute off-diagonal entry of ``P^T P`` for unit-normalized loadings."""
    return min(1.0, _mean_abs_lower(_cosines(P, "loading")))


def _total(X):
    total = float(np.sum(np.asarray(X, dtype=float) ** 2))
    if total == 0:
        raise InvalidInput("X is identically zero")
    return total


def rss(X, T, P):
    """``trace(E^T E) / trace(X^T X)``."""
    E = residuals(X, T, P)
    return float(np.sum(E**2)) / _total(X)


def _check_E(E, X):
    E = np.asarray(E, dtype=float)
    if E.shape != np.shape(X):
        raise ShapeError(f"E has shape {E.shape}, X has {np.shape(X)}")
    return E


def tot_qr(T, E, X):
    X, _, T = _conform(X, None, T)
    E = _check_E(E, X)
    return (qr_variance(T) + float(np.sum(E**2))) / _total(X)


def tot_t(T, E, X):
    X, _, T = _conform(X, None, T)
    E = _check_E(E, X)
    return (float(np.sum(T**2)) + float(np.sum(E**2))) / _total(X)


def tot_pt(T, P, E, X):
    X, P, T = _conform(X, P, T)
    E = _check_E(E, X)
    return (float(np.sum((T @ P.T) ** 2)) + float(np.sum(E**2))) / _total(X)


@dataclass
class StatsReport:
    macs: float
    macl: float
    rss: float
    tot_qr: float
    tot_t: float
    tot_pt: float
    score_mode: str = "naive"

    def as_dict(self):
        return asdict(self)


STATISTICS = ("macs", "macl", "rss", "tot_qr", "tot_t", "tot_pt")


def stats_report(X, T, P, score_mode="naive"):
    """All six statistics for scores `T` and loadings `P` on data `X`."""
    X, P, T = _conform(X, P, T)
    E = X - T @ P.T
    A = P.shape[1]
    return StatsReport(
        macs=macs(T) if A >= 2 else 0.0,
        macl=macl(P) if A >= 2 else 0.0,
        rss=float(np.sum(E**2)) / _total(X),
        tot_qr=tot_qr(T, E, X),
        tot_t=tot_t(T, E, X),
        tot_pt=tot_pt(T, P, E, X),
        score_mode=score_mode,
    )


def model_reports(X, model):
    """Naive and corrected `StatsReport` for a fitted `FactorModel`."""
    naive = stats_report(X, model.T, model.P, "naive")
    corrected = stats_report(X, corrected_scores(X, model.P), model.P, "corrected")
    return naive, corrected


@dataclass
class SplitCheck:
    """
    Diagnostics of ``||X||^2 = ||T P^T||^2 + ||E||^2``.

    ``defect`` is the absolute gap, ``cross`` is ``trace(P T^T E)`` (the
    defect equals ``2 |cross|`` when ``X = T P^T + E``), ``ep_norm`` and
    ``te_norm`` are the Frobenius norms of ``E P`` and ``T^T E``.
    """

    defect: float
    cross: float
    ep_norm: float
    te_norm: float

    @property
    def loading_space(self):
        return self.ep_norm

    @property
    def score_space(self):
        return self.te_norm


def variance_split_check(X, T, P, E=None):
    X, P, T = _conform(X, P, T)
    E = X - T @ P.T if E is None else _check_E(E, X)
    fit = T @ P.T
    defect = abs(float(np.sum(X**2)) - float(np.sum(fit**2)) - float(np.sum(E**2)))
    return SplitCheck(
        defect=defect,
        cross=float(np.trace(P @ T.T @ E)),
        ep_norm=float(np.linalg.norm(E @ P)),
        te_norm=float(np.linalg.norm(T.T @ E)),
    )

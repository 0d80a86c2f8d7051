"""
Noise-free data generators and sparsity calibration.

gen_orthogonal_spectra
    5 x 20, two spectral components on disjoint variable blocks
gen_nonorthogonal_spectra
    5 x 20, three overlapping spectral components with correlated scores
gen_montecarlo
    50 x 200, five random sparse loadings (about 16% nonzero)
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SparsePCAError
from .methods import KNOB, fit_method, knob_from_level
from .numerics import GaussianStream
from .pca import count_nonzero

log = logging.getLogger(__name__)

SPECTRAL_SHAPE = np.array([0.1, 0.3, 0.5, 0.7, 0.9, 0.9, 0.7, 0.5, 0.3, 0.1])


@dataclass
class SimulatedDataset:
    X: np.ndarray
    T_true: np.ndarray
    P_true: np.ndarray
    nnz_true: int
    seed: Optional[int] = None
    flags: list = field(default_factory=list)

    @property
    def shape(self):
        return self.X.shape


def _spectral_loadings(M, starts):
    P = np.zeros((M, len(starts)))
    for a, s in enumerate(starts):
        P[s:s + SPECTRAL_SHAPE.size, a] = SPECTRAL_SHAPE
    return P


def _dataset(T, P, seed=None, flags=None):
    return SimulatedDataset(X=T @ P.T, T_true=T, P_true=P, nnz_true=count_nonzero(P),
                            seed=seed, flags=list(flags or []))


def gen_orthogonal_spectra():
    """Two components on variables 1-10 and 11-20; orthogonal scores and loadings."""
    P = _spectral_loadings(20, [0, 10])
    T = np.array([[0.5, 0, 0.5, 0, 0.5],
                  [0, 0.25, 0, 0.25, 0]]).T
    return _dataset(T, P)


def gen_nonorthogonal_spectra():
    """Three components on variables 1-10, 6-15 and 11-20; correlated scores."""
    P = _spectral_loadings(20, [0, 5, 10])
    T = np.array([[0.5, 0.5, 0.5, 0.5, 0],
                  [0.25, 0, 0.25, 0, 0.25],
                  [0, 0.125, 0, 0.125, 0]]).T
    return _dataset(T, P)


def gen_montecarlo(seed, N=50, M=200, A=5, score_decay=0.5):
    """
    Random sparse rank-`A` data.

    Draw order from ``GaussianStream(seed)``, each matrix filled row by row:
    loadings ``P`` (M x A), mask ``W`` (M x A), scores ``T`` (N x A).
    ``P_ij`` is zeroed where ``W_ij < 1``. Score column ``a`` (zero-based) is
    scaled by ``score_decay ** a``. A loading column left entirely zero is
    redrawn (its P column, then its W column) from the continuing stream and
    the event is recorded in ``flags``.
    """
    stream = GaussianStream(seed)
    P = stream.normal((M, A))
    W = stream.normal((M, A))
    T = stream.normal((N, A)) * score_decay ** np.arange(A)
    P[W < 1.0] = 0.0
    flags = []
    for a in range(A):
        while not np.any(P[:, a]):
            flags.append(f"redrew loading column {a}")
            col = stream.normal(M)
            w = stream.normal(M)
            col[w < 1.0] = 0.0
            P[:, a] = col
    return _dataset(T, P, seed=seed, flags=flags)


@dataclass
class Calibration:
    method: str
    knob: Optional[str]
    value: Optional[float]
    nnz: int
    target: int
    model: object = None
    warning: Optional[str] = None
    evaluations: int = 0


def calibrate_sparsity(method, X, target_nnz, A, iterations=25):
    """
    Choose the method's sparsity knob so the fitted loadings have about
    `target_nnz` nonzeros.

    The knob is bisected over its restrictiveness level (see
    :func:`sparsepca.methods.knob_from_level`) for `iterations` steps. The
    least restrictive setting whose count does not exceed the target is
    preferred, and the best evaluated setting by ``|nnz - target|`` is
    returned (ties go to the less restrictive one). A fit that fails (a
    zeroed component) counts as too sparse. If the evaluated counts are not
    monotone the result carries a warning.
    """
    X = np.asarray(X, dtype=float)
    if KNOB[method] is None:
        model = fit_method(method, X, A)
        return Calibration(method, None, None, model.nnz, int(target_nnz), model, None, 1)

    evaluated = []
    cache = {}

    def evaluate(level):
        value = knob_from_level(method, level, X)
        if value not in cache:
            try:
                model = fit_method(method, X, A, value)
                cache[value] = (model, model.nnz)
            except SparsePCAError:
                cache[value] = (None, None)
        model, nnz = cache[value]
        evaluated.append((level, value, nnz, model))
        return nnz

    def too_sparse(nnz):
        return nnz is None or nnz <= target_nnz

    lo, hi = 0.0, 1.0
    if not too_sparse(evaluate(lo)):
        evaluate(hi)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if too_sparse(evaluate(mid)):
                hi = mid
            else:
                lo = mid

    ok = [e for e in evaluated if e[2] is not None]
    warning = None
    if not ok:
        warning = "no setting produced a valid fit"
        log.warning("%s: %s", method, warning)
        return Calibration(method, KNOB[method], None, 0, int(target_nnz), None, warning,
                           len(cache))
    level, value, nnz, model = min(ok, key=lambda e: (abs(e[2] - target_nnz), e[0]))
    by_level = sorted(ok, key=lambda e: e[0])
    counts = [e[2] for e in by_level]
    if any(b > a for a, b in zip(counts, counts[1:])):
        warning = "nonzero count is not monotone in the sparsity knob"
        log.info("%s: %s", method, warning)
    return Calibration(method, KNOB[method], value, nnz, int(target_nnz), model, warning,
                       len(cache))

"""Uniform entry point to the nine model variants and their sparsity knobs."""

import numpy as np

from .errors import InvalidInput
from .gpca import fit_gpca
from .pca import METHODS, fit_pca
from .pmd import PmdConfig, fit_pmd
from .spca import SpcaConfig, fit_spca_sequential, fit_spca_simultaneous

# name of the scalar knob each method family is calibrated on
KNOB = {
    "PCA": None,
    "SPCA": "nnz", "SPCA-Sq": "nnz",
    "PMD-PD": "c2", "PMD-O": "c2", "PMD-M": "c2",
    "GPCA-PD": "gamma", "GPCA-M": "gamma", "GPCA-O": "gamma",
}

_PMD_DEFLATION = {"PMD-PD": "projection", "PMD-O": "orthogonalized", "PMD-M": "mackey"}
_GPCA_DEFLATION = {"GPCA-PD": "projection", "GPCA-M": "mackey", "GPCA-O": "orthogonalized"}

GAMMA_RANGE = (0.01, 0.99)


def knob_from_level(method, level, X):
    """
    Map a restrictiveness level in [0, 1] to the method's knob value.

    Level 0 is the least sparse setting (all loadings kept, slack L1 budget,
    lowest group threshold) and level 1 the most restrictive one.
    """
    knob = KNOB[method]
    if knob == "nnz":
        M = X.shape[1]
        return int(round(M - level * (M - 1)))
    if knob == "c2":
        top = np.sqrt(X.shape[1])
        return float(top - level * (top - 1.0))
    if knob == "gamma":
        lo, hi = GAMMA_RANGE
        return float(lo + level * (hi - lo))
    return None


def fit_method(method, X, A, knob=None, **options):
    """
    Fit `method` with `A` components.

    `knob` is the scalar sparsity setting: the number of nonzero loadings per
    component for the SPCA variants, ``c2`` for PMD and the group threshold
    ``gamma`` for GPCA. ``None`` selects the least sparse setting. Extra
    keyword options go to the underlying config (or, for GPCA and SPCA-Sq,
    to the fitting function).
    """
    if method not in METHODS:
        raise InvalidInput(f"unknown method {method!r}")
    X = np.asarray(X, dtype=float)
    if method == "PCA":
        return fit_pca(X, A)
    if knob is None:
        knob = knob_from_level(method, 0.0, X)
    if method == "SPCA":
        return fit_spca_simultaneous(X, A, SpcaConfig(nnz=int(knob), **options))
    if method == "SPCA-Sq":
        deflation = options.pop("deflation", "score")
        return fit_spca_sequential(X, A, SpcaConfig(nnz=int(knob), **options), deflation)
    if method in _PMD_DEFLATION:
        c2 = min(max(float(knob), 1.0), float(np.sqrt(X.shape[1])))
        return fit_pmd(X, A, PmdConfig(c2=c2, deflation=_PMD_DEFLATION[method], **options))
    return fit_gpca(X, A, gamma=float(knob), deflation=_GPCA_DEFLATION[method], **options)

"""
Group-wise PCA.

Variables are grouped through a correlation map; each component is the
leading loading of one group of variables (zeros elsewhere), picked as the
candidate capturing the most variance of the current deflated data.
"""

from dataclasses import dataclass, field

import numpy as np

from .deflation import MackeyState, mackey_deflate, orthogonalize_left, projection_deflate
from .errors import InvalidInput, RankExhausted
from .numerics import as_matrix
from .pca import FactorModel, check_components

_METHOD_TAG = {"projection": "GPCA-PD", "mackey": "GPCA-M", "orthogonalized": "GPCA-O"}
DEFAULT_GAMMA = 0.7
# columns whose norm falls below this fraction of the largest column are treated as empty
_ZERO_COLUMN_RTOL = 1e-10


@dataclass
class CorrelationMap:
    """Symmetric map of variable associations with unit diagonal; ``degenerate`` lists empty columns."""

    matrix: np.ndarray
    degenerate: list = field(default_factory=list)

    def __len__(self):
        return self.matrix.shape[0]


def correlation_map(X, center=False):
    """
    Correlation map between the columns of `X`.

    With ``center=False`` (the default, consistent with the uncentered
    models fitted here) the entries are cosines between raw columns; with
    ``center=True`` the columns are mean-centered first, giving Pearson
    correlations. Columns with (numerically) zero norm get zero
    off-diagonal entries and are reported in ``degenerate``.
    """
    X = as_matrix(X)
    Z = X - X.mean(axis=0) if center else X
    norms = np.linalg.norm(Z, axis=0)
    scale = norms.max() if norms.size else 0.0
    empty = norms <= _ZERO_COLUMN_RTOL * scale if scale > 0 else np.ones_like(norms, dtype=bool)
    safe = np.where(empty, 1.0, norms)
    Zn = Z / safe
    Zn[:, empty] = 0.0
    C = Zn.T @ Zn
    C = np.clip(0.5 * (C + C.T), -1.0, 1.0)
    np.fill_diagonal(C, 1.0)
    return CorrelationMap(matrix=C, degenerate=np.flatnonzero(empty).tolist())


def find_groups(cmap, gamma):
    """
    Threshold-seeded groups: ``group_i = {j : |m_ij| >= gamma}``.

    Duplicates are dropped keeping the first occurrence, so groups come out
    ordered by their lowest seed variable. Returns a list of index arrays.
    """
    if not 0.0 < gamma < 1.0:
        raise InvalidInput(f"gamma must lie in (0, 1), got {gamma}")
    C = cmap.matrix if isinstance(cmap, CorrelationMap) else np.asarray(cmap, dtype=float)
    mask = np.abs(C) >= gamma
    np.fill_diagonal(mask, True)
    groups = []
    seen = set()
    for i in range(mask.shape[0]):
        key = mask[i].tobytes()
        if key in seen:
            continue
        seen.add(key)
        groups.append(np.flatnonzero(mask[i]))
    return groups


def _leading_group_loading(Xg):
    # leading right singular vector via the smaller Gram matrix
    n, k = Xg.shape
    if k <= n:
        w, V = np.linalg.eigh(Xg.T @ Xg)
        v = V[:, -1]
        lam = w[-1]
    else:
        w, U = np.linalg.eigh(Xg @ Xg.T)
        lam = w[-1]
        v = Xg.T @ U[:, -1]
        nv = np.linalg.norm(v)
        v = v / nv if nv > 0 else v
    # refine: one power step recovers full precision lost in the Gram route
    v = Xg.T @ (Xg @ v)
    nv = np.linalg.norm(v)
    if nv == 0:
        return np.zeros(k), 0.0
    v = v / nv
    i = np.argmax(np.abs(v))
    if v[i] < 0:
        v = -v
    return v, float(max(lam, 0.0))


def group_candidates(X, groups):
    """
    Candidate loadings, one per group.

    Returns ``(loadings, variances)`` where column ``g`` of ``loadings`` is the
    unit leading right singular vector of ``X[:, groups[g]]`` embedded in
    ``M`` dimensions and ``variances[g] = ||X p_g||^2``.
    """
    M = X.shape[1]
    Pc = np.zeros((M, len(groups)))
    var = np.zeros(len(groups))
    for g, idx in enumerate(groups):
        v, _ = _leading_group_loading(X[:, idx])
        Pc[idx, g] = v
        var[g] = float(np.sum((X[:, idx] @ v) ** 2))
    return Pc, var


def fit_gpca(X, A, gamma=DEFAULT_GAMMA, deflation="mackey", center_map=False,
             recompute_groups=False):
    """
    Group-wise PCA with `A` components.

    Groups are identified once from the correlation map of `X` (or, with
    `recompute_groups`, from the deflated data before every component).
    Candidate loadings are computed on the deflated data; the one with the
    largest captured variance wins, ties going to the lowest seed variable.

    Raises
    ------
    RankExhausted
        When no candidate captures any variance.
    """
    X, A = check_components(X, A)
    if deflation not in _METHOD_TAG:
        raise InvalidInput(f"unknown deflation {deflation!r}")
    N, M = X.shape
    total = float(np.sum(X**2))
    P = np.zeros((M, A))
    T = np.zeros((N, A))
    state = MackeyState.initial(M) if deflation == "mackey" else None
    Qm = np.zeros((M, A)) if state is not None else None
    Xa = X.copy()
    chosen = []
    groups = find_groups(correlation_map(X, center=center_map), gamma)
    for a in range(A):
        if recompute_groups and a > 0:
            groups = find_groups(correlation_map(Xa, center=center_map), gamma)
        Pc, var = group_candidates(Xa, groups)
        g = int(np.argmax(var))
        if var[g] <= 1e-24 * total:
            raise RankExhausted(f"no group carries variance at component {a}", component=a)
        p = Pc[:, g]
        chosen.append(groups[g].tolist())
        P[:, a] = p
        t = Xa @ p
        T[:, a] = t
        if deflation == "projection":
            Xa = projection_deflate(Xa, p)
        elif deflation == "orthogonalized":
            Xa = orthogonalize_left(Xa, t)
        else:
            Xa, state, q = mackey_deflate(Xa, state, p)
            Qm[:, a] = q
    info = {"groups": chosen}
    if state is not None:
        info["mackey_degenerate"] = list(state.degenerate)
    info["n_groups"] = len(groups)
    return FactorModel(T=T, P=P, Q=Qm, method=_METHOD_TAG[deflation], deflation=deflation,
                       params={"gamma": float(gamma)}, info=info)

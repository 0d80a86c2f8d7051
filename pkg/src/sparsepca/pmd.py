"""
Penalized matrix decomposition with an L1 budget on the right vector.

The rank-one problem::

    max_{u, p} u^T X p   s.t. ||p||_1 <= c2, ||p||_2 <= 1, ||u||_2 <= 1

is solved by alternating a soft-thresholding update of ``p`` with a
normalized update of ``u``. Multiple components are obtained under one of
three deflation regimes:

projection
    ``X <- X - d u p^T``
orthogonalized
    every new ``u`` is constrained to the orthogonal complement of the
    previous ones (and the data are deflated on the left, ``X <- (I - u u^T) X``),
    which makes the scores orthogonal
mackey
    Mackey's generalized deflation, see :mod:`sparsepca.deflation`
"""

from dataclasses import dataclass

import numpy as np

from .deflation import MackeyState, mackey_deflate, orthogonalize_left, projection_deflate
from .errors import DegenerateComponent, InvalidInput
from .numerics import as_matrix, leading_singular_triplet, qr, soft_threshold
from .pca import FactorModel, check_components

_METHOD_TAG = {"projection": "PMD-PD", "orthogonalized": "PMD-O", "mackey": "PMD-M"}


@dataclass
class PmdConfig:
    c2: float = 1.0
    max_iter: int = 1000
    tol: float = 1e-10
    deflation: str = "projection"

    def validate(self, M):
        if self.deflation not in _METHOD_TAG:
            raise InvalidInput(f"unknown deflation {self.deflation!r}")
        if not 1.0 <= self.c2 <= np.sqrt(M) + 1e-12:
            raise InvalidInput(f"c2={self.c2} outside [1, sqrt({M})]")
        if self.max_iter < 1 or self.tol < 0:
            raise InvalidInput("max_iter must be >= 1 and tol >= 0")


@dataclass
class PmdRankOne:
    u: np.ndarray
    p: np.ndarray
    d: float
    iterations: int = 0
    history: list = None


def l1_constrained_direction(z, c2, max_bisect=60):
    """
    Unit vector ``S(z, delta) / ||S(z, delta)||`` with the smallest
    ``delta >= 0`` such that its L1 norm is at most `c2`.

    The ratio ``||S(z, delta)||_1 / ||S(z, delta)||_2`` decreases in
    ``delta``. The sorted magnitudes of `z` split the delta axis into
    segments with a fixed active set; the crossing segment is located from
    the ratio at the breakpoints and ``delta`` is then bisected inside it on
    closed-form sums.

    Returns ``(p, delta)``; ``p`` is the zero vector when ``z == 0``.
    """
    z = np.asarray(z, dtype=float)
    norm = np.linalg.norm(z)
    if norm == 0:
        return np.zeros_like(z), 0.0
    p = z / norm
    if np.abs(p).sum() <= c2:
        return p, 0.0
    a = np.sort(np.abs(z))[::-1]
    csum = np.cumsum(a)
    csq = np.cumsum(a * a)
    k = np.arange(1, a.size + 1)
    # ratio with the top k entries active, evaluated at delta = a[k] (entry k+1 just zeroed)
    nxt = np.append(a[1:], 0.0)
    l1 = csum - k * nxt
    l2 = np.sqrt(np.maximum(csq - 2 * nxt * csum + k * nxt * nxt, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(l2 > 0, l1 / l2, 1.0)
    # ratio at the breakpoints increases with k; first k whose ratio exceeds c2 brackets the root
    j = int(np.argmax(ratio > c2))
    lo, hi = nxt[j], a[j]
    if j > 0:
        hi = min(hi, nxt[j - 1]) if nxt[j - 1] > lo else hi
    kk, c1, c2sq = j + 1, csum[j], csq[j]
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        s1 = c1 - kk * mid
        s2 = c2sq - 2 * mid * c1 + kk * mid * mid
        if s2 <= 0 or s1 / np.sqrt(s2) <= c2:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * a[0]:
            break
    s = soft_threshold(z, hi)
    s_norm = np.linalg.norm(s)
    if s_norm == 0:
        # ties at the maximum: no thresholding reaches c2, keep the largest entries
        s = soft_threshold(z, a[0] * (1 - 1e-12))
        s_norm = np.linalg.norm(s)
    return s / s_norm, hi


def _project_out(v, basis):
    if basis is None or basis.shape[1] == 0:
        return v
    return v - basis @ (basis.T @ v)


def pmd_rank_one(X, cfg, u_constraint=None, track=False, component=0):
    """
    Rank-one PMD of `X`.

    Parameters
    ----------
    X : ndarray, shape (N, M)
    cfg : PmdConfig
    u_constraint : ndarray, shape (N, k), optional
        Orthonormal basis the left vector must stay orthogonal to.
    track : bool
        Record ``u^T X p`` after every half-step in ``history``.

    Returns
    -------
    PmdRankOne
        ``d = u^T X p``. The final half-step is always a ``u`` update, so
        ``d u`` equals ``X p`` projected on the complement of `u_constraint`.
    """
    X = as_matrix(X)
    cfg.validate(X.shape[1])
    u, _, _ = leading_singular_triplet(X)
    u = _project_out(u, u_constraint)
    nu = np.linalg.norm(u)
    if nu < 1e-12:
        # leading direction already excluded; start from the best allowed one
        u, _, _ = leading_singular_triplet(_project_out(X, u_constraint))
        u = _project_out(u, u_constraint)
        nu = np.linalg.norm(u)
        if nu < 1e-12:
            raise DegenerateComponent("no admissible left direction", component=component)
    u = u / nu
    p = None
    history = [] if track else None
    it = 0
    for it in range(1, cfg.max_iter + 1):
        p_new, _ = l1_constrained_direction(X.T @ u, cfg.c2)
        if not np.any(p_new):
            raise DegenerateComponent(f"X^T u fully thresholded at component {component}",
                                      component=component)
        if track:
            history.append(float(u @ X @ p_new))
        Xp = _project_out(X @ p_new, u_constraint)
        n_xp = np.linalg.norm(Xp)
        if n_xp == 0:
            raise DegenerateComponent(f"X p vanishes at component {component}", component=component)
        u_new = Xp / n_xp
        if track:
            history.append(float(u_new @ X @ p_new))
        done = p is not None and (np.linalg.norm(p_new - p) < cfg.tol
                                  and np.linalg.norm(u_new - u) < cfg.tol)
        u, p = u_new, p_new
        if done:
            break
    d = float(u @ X @ p)
    return PmdRankOne(u=u, p=p, d=max(d, 0.0), iterations=it, history=history)


def fit_pmd(X, A, cfg):
    """
    Extract `A` PMD components sequentially under ``cfg.deflation``.

    Scores are ``t_a = X_{a-1} p_a`` on the deflated data; for the
    orthogonalized variant they are mutually orthogonal.
    """
    X, A = check_components(X, A)
    N, M = X.shape
    cfg.validate(M)
    P = np.zeros((M, A))
    T = np.zeros((N, A))
    d = np.zeros(A)
    Ubasis = np.zeros((N, 0))
    state = MackeyState.initial(M) if cfg.deflation == "mackey" else None
    Qm = np.zeros((M, A)) if state is not None else None
    Xa = X.copy()
    iters = []
    for a in range(A):
        constraint = Ubasis if cfg.deflation == "orthogonalized" else None
        r1 = pmd_rank_one(Xa, cfg, u_constraint=constraint, component=a)
        P[:, a] = r1.p
        T[:, a] = Xa @ r1.p
        d[a] = r1.d
        iters.append(r1.iterations)
        if cfg.deflation == "projection":
            Xa = Xa - r1.d * np.outer(r1.u, r1.p)
        elif cfg.deflation == "orthogonalized":
            Xa = orthogonalize_left(Xa, r1.u)
            # re-orthonormalize the accumulated basis to keep drift in check
            Ubasis = qr(np.column_stack((Ubasis, r1.u))).Q
        else:
            Xa, state, q = mackey_deflate(Xa, state, r1.p)
            Qm[:, a] = q
    info = {"iterations": iters, "d": d}
    if state is not None:
        info["mackey_degenerate"] = list(state.degenerate)
    return FactorModel(T=T, P=P, Q=Qm, method=_METHOD_TAG[cfg.deflation],
                       deflation=cfg.deflation, params={"c2": cfg.c2}, info=info)

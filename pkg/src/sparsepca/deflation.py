"""
Deflation operators.

Projection deflation removes a unit loading direction from the row space,
``X <- X (I - p p^T)``. Applied with a sequence of non-orthogonal loadings it
re-introduces directions removed earlier. Mackey's generalized deflation
avoids this by deflating with the Gram-Schmidt residual ``q`` of each new
loading against the directions already removed.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, ShapeError

MACKEY_ZERO_TOL = 1e-10


def _unit(p, tol=1e-9):
    p = np.asarray(p, dtype=float).ravel()
    norm = np.linalg.norm(p)
    if norm == 0:
        raise InvalidInput("deflation direction is the zero vector")
    if abs(norm - 1.0) > tol:
        p = p / norm
    return p


def projection_deflate(X, p):
    """
    Return ``X (I - p p^T)``.

    A non-unit `p` is handled through the general form
    ``X (I - p (p^T p)^{-1} p^T)``, i.e. it is normalized first.
    """
    X = np.asarray(X, dtype=float)
    p = _unit(p)
    if X.shape[1] != p.size:
        raise ShapeError(f"p has length {p.size}, X has {X.shape[1]} columns")
    return X - np.outer(X @ p, p)


def covariance_projection_deflate(C, p, sym_tol=1e-9):
    """Return ``(I - p p^T) C (I - p p^T)`` for a symmetric `C`."""
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ShapeError(f"C must be square, got {C.shape}")
    scale = max(1.0, np.max(np.abs(C)))
    if np.max(np.abs(C - C.T)) > sym_tol * scale:
        raise InvalidInput("C is not symmetric")
    p = _unit(p)
    if p.size != C.shape[0]:
        raise ShapeError(f"p has length {p.size}, C is {C.shape}")
    Cp = C @ p
    pCp = p @ Cp
    # (I - pp')C(I - pp') expanded to avoid forming the projector
    return C - np.outer(Cp, p) - np.outer(p, Cp) + pCp * np.outer(p, p)


@dataclass
class MackeyState:
    """
    Accumulator for Mackey's generalized deflation.

    ``B`` starts as the identity and stays the orthogonal projector onto the
    complement of the collected ``q`` vectors (columns of ``Qacc``).
    ``degenerate`` lists the call indices where ``B p`` vanished.
    """

    B: np.ndarray
    Qacc: np.ndarray
    degenerate: list = field(default_factory=list)

    @classmethod
    def initial(cls, M):
        return cls(B=np.eye(M), Qacc=np.zeros((M, 0)))

    @property
    def calls(self):
        return self.Qacc.shape[1] + len(self.degenerate)


def mackey_deflate(X, state, p):
    """
    One step of Mackey's generalized (Gram-Schmidt) deflation.

    Parameters
    ----------
    X : ndarray, shape (N, M)
        Current deflated data.
    state : MackeyState
    p : ndarray, shape (M,)
        New loading.

    Returns
    -------
    X_new : ndarray
    state_new : MackeyState
    q : ndarray
        Unit direction actually removed, or the zero vector when ``B p``
        vanishes (the loading lies in the span of earlier ones); in that case
        ``X`` and ``B`` are returned unchanged and the call is flagged in
        ``state_new.degenerate``.
    """
    X = np.asarray(X, dtype=float)
    p = _unit(p)
    q = state.B @ p
    norm = np.linalg.norm(q)
    if norm < MACKEY_ZERO_TOL:
        new = MackeyState(B=state.B.copy(), Qacc=state.Qacc.copy(),
                          degenerate=state.degenerate + [state.calls])
        return X.copy(), new, np.zeros_like(p)
    q = q / norm
    X_new = X - np.outer(X @ q, q)
    B_new = state.B - np.outer(state.B @ q, q)
    # B is symmetric in exact arithmetic; keep it that way numerically
    B_new = 0.5 * (B_new + B_new.T)
    new = MackeyState(B=B_new, Qacc=np.column_stack((state.Qacc, q)),
                      degenerate=list(state.degenerate))
    return X_new, new, q


def orthogonalize_left(X, u):
    """Return ``(I - u u^T) X`` for a unit score direction `u` (u-side deflation)."""
    u = _unit(u)
    return X - np.outer(u, u @ X)

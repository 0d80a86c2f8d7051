"""
Dense linear-algebra primitives with fixed sign and ordering conventions.

Everything downstream (PCA, the sparse variants, the diagnostics) goes through
these helpers so that singular vectors, QR factors and random draws are
reproducible bit for bit on a given platform.

svd
    thin SVD, singular values descending, largest |v_ij| in each column of V positive
qr
    thin QR with a nonnegative diagonal in R
pinv
    Moore-Penrose pseudoinverse with a relative cutoff of 1e-12
soft_threshold
    sign(x) * max(|x| - delta, 0)
GaussianStream
    PCG64 raw words -> 53-bit uniforms -> Box-Muller standard normals
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, ShapeError

PINV_RTOL = 1e-12


def as_matrix(X, name="X"):
    """Return `X` as a finite 2-D float64 array or raise."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={X.ndim}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ShapeError(f"{name} must have at least one row and one column, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return X


@dataclass(frozen=True)
class SvdResult:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        if self.S.size == 0 or self.S[0] == 0:
            return 0
        return int(np.sum(self.S > 1e-10 * max(1.0, self.S[0])))


@dataclass(frozen=True)
class QrResult:
    Q: np.ndarray
    R: np.ndarray


def _fix_signs(U, V):
    # largest-magnitude entry of each column of V made positive; argmax picks the first on ties
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs


def svd(X):
    """
    Thin singular value decomposition ``X = U @ diag(S) @ V.T``.

    Parameters
    ----------
    X : array_like, shape (N, M)

    Returns
    -------
    SvdResult
        ``U`` is N x r, ``S`` has length r = min(N, M) sorted descending and
        ``V`` is M x r. In every column of ``V`` the entry of largest
        magnitude is positive; the matching column of ``U`` is flipped with it.
    """
    X = as_matrix(X)
    U, S, Vt = np.linalg.svd(X, full_matrices=False)
    U, V = _fix_signs(U, Vt.T)
    return SvdResult(U=U, S=S, V=V)


def leading_singular_triplet(X):
    """Return ``(u, s, v)`` for the largest singular value of `X`."""
    res = svd(X)
    return res.U[:, 0], res.S[0], res.V[:, 0]


def qr(T):
    """
    Thin QR factorization with ``diag(R) >= 0``.

    Raises
    ------
    ShapeError
        If `T` has fewer rows than columns.
    """
    T = as_matrix(T, "T")
    n, a = T.shape
    if n < a:
        raise ShapeError(f"qr needs rows >= cols, got {T.shape}")
    Q, R = np.linalg.qr(T, mode="reduced")
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    Q = Q * signs
    R = np.triu(R * signs[:, None])
    return QrResult(Q=Q, R=R)


def pinv(G, rtol=PINV_RTOL):
    """
    Moore-Penrose pseudoinverse through the SVD.

    Singular values below ``rtol * max(S)`` are treated as zero. Only
    ``P.T @ P`` style Gram matrices are inverted in this package, but the
    routine itself works for any matrix.
    """
    G = as_matrix(G, "G")
    res = svd(G)
    if res.S.size == 0 or res.S[0] == 0:
        return np.zeros(G.shape[::-1])
    keep = res.S > rtol * res.S[0]
    inv_s = np.zeros_like(res.S)
    inv_s[keep] = 1.0 / res.S[keep]
    return (res.V * inv_s) @ res.U.T


def soft_threshold(x, delta):
    """Componentwise ``sign(x) * max(|x| - delta, 0)``."""
    if delta < 0:
        raise InvalidInput(f"threshold must be nonnegative, got {delta}")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - delta, 0.0)


class GaussianStream:
    """
    Deterministic stream of standard normal draws.

    Raw 64-bit words come from numpy's PCG64 bit generator (whose output
    sequence for a given seed is fixed across numpy releases). The top 53
    bits of each word give a uniform double in [0, 1), and consecutive pairs
    are mapped to normals with the Box-Muller transform::

        z0 = sqrt(-2 log(1 - u1)) * cos(2 pi u2)
        z1 = sqrt(-2 log(1 - u1)) * sin(2 pi u2)

    Draws are emitted in the order z0, z1 of pair 1, z0, z1 of pair 2, ...,
    independent of how the caller chunks its requests.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._bitgen = np.random.PCG64(self.seed)
        self._spare = None

    def _uniforms(self, n):
        raw = self._bitgen.random_raw(n)
        return (raw >> np.uint64(11)).astype(float) * (1.0 / 9007199254740992.0)

    def normal(self, size=None):
        """Return the next draws; `size` may be None (scalar), an int or a shape tuple."""
        shape = () if size is None else (size if isinstance(size, tuple) else (int(size),))
        n = int(np.prod(shape, dtype=int))
        out = np.empty(n)
        pos = 0
        if n and self._spare is not None:
            out[0] = self._spare
            self._spare = None
            pos = 1
        need = n - pos
        if need > 0:
            pairs = (need + 1) // 2
            u = self._uniforms(2 * pairs).reshape(pairs, 2)
            radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
            angle = 2.0 * np.pi * u[:, 1]
            z = np.column_stack((radius * np.cos(angle), radius * np.sin(angle))).ravel()
            out[pos:] = z[:need]
            if z.size > need:
                self._spare = float(z[need])
        if size is None:
            return float(out[0])
        return out.reshape(shape)


def gaussian_stream(seed):
    """Return a fresh `GaussianStream` for `seed`."""
    return GaussianStream(seed)

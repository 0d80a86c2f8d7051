"""
Deflating with correlated loadings
==================================

Removing one loading direction at a time with ``X (I - p p^T)`` works for
orthogonal loadings. With correlated ones, each new projection brings back
part of what was removed earlier. Deflating with the Gram-Schmidt residual
of each loading avoids that.
"""

import numpy as np

from sparsepca import MackeyState, mackey_deflate, projection_deflate

rng = np.random.default_rng(7)
X = rng.standard_normal((10, 8))
base = rng.standard_normal(8)
loadings = [base + 0.6 * rng.standard_normal(8) for _ in range(3)]
loadings = [p / np.linalg.norm(p) for p in loadings]

# %% Projection deflation
Xp = X
for p in loadings:
    Xp = projection_deflate(Xp, p)
print("projection: ||X_3 p_j|| =", [round(float(np.linalg.norm(Xp @ p)), 4) for p in loadings])

# %% Generalized deflation
Xm, state = X, MackeyState.initial(8)
for p in loadings:
    Xm, state, q = mackey_deflate(Xm, state, p)
print("mackey:     ||X_3 p_j|| =", [f"{np.linalg.norm(Xm @ p):.1e}" for p in loadings])
print("q^T q =\n", np.round(state.Qacc.T @ state.Qacc, 12))

"""Search-state bookkeeping and the subspace projected approximate matrix.

The outer iteration accumulates an orthonormal basis V together with the
cached products W = A V and the projected block M = V^T A V. From these and
a fixed approximating matrix A0, the subspace projected approximate matrix

    A_k = -V M V^T + W V^T + V W^T + P A0 P,    P = I - V V^T,

agrees with A on the search space and on its image (A_k V = A V and
V^T A_k = V^T A) while borrowing the action of A0 on the untouched
directions. Its matvec needs one product with A0 and none with A.
"""

from __future__ import annotations

import warnings

import numpy as np

from spameig.linop import DENSIFY_CAP, SymmetricOperator, _as_vector


class SearchState:
    """Orthonormal basis with cached operator products.

    Holds V (n x k, orthonormal), W = A V and the symmetric projected block
    M = V^T W. Single-owner mutable: one solver run grows it via
    ``expand_state``; anything else reads it between expansions.
    """

    def __init__(self, n):
        n = int(n)
        if n < 1:
            raise ValueError("space dimension must be positive")
        self._n = n
        self.V = np.empty((n, 0))
        self.W = np.empty((n, 0))
        self.M = np.empty((0, 0))

    @property
    def n(self):
        return self._n

    @property
    def k(self):
        return self.V.shape[1]

    def residual_matrix(self):
        """The block W - V M, whose columns are Ritz residual directions."""
        return self.W - self.V @ self.M


def expand_state(state, q, operator, orth_tol=1e-10):
    """Append the orthonormal direction ``q``; costs one counted matvec.

    The new column of M reuses the cached W, so growing the projection
    never touches the operator beyond the single product A q. Raises when
    ``q`` is not normalized and orthogonal to the basis within ``orth_tol``.
    """
    q = _as_vector(q, state.n)
    if abs(np.linalg.norm(q) - 1.0) > orth_tol:
        raise ValueError("expansion vector must have unit norm")
    if state.k and np.abs(state.V.T @ q).max() > orth_tol:
        raise ValueError("expansion vector is not orthogonal to the basis")
    w = operator.apply(q)
    k = state.k
    grown = np.zeros((k + 1, k + 1))
    grown[:k, :k] = state.M
    cross = state.W.T @ q
    grown[:k, k] = cross
    grown[k, :k] = cross
    grown[k, k] = q @ w
    state.V = np.column_stack([state.V, q])
    state.W = np.column_stack([state.W, w])
    state.M = grown
    return state


class SpamOperator(SymmetricOperator):
    """Implicit matvec with the subspace projected approximate matrix.

    Each apply consumes exactly one counted product with the approximating
    matrix and none with the exact one. With an empty basis the operator
    reduces to the approximating matrix itself.
    """

    def __init__(self, state, a0):
        if a0.dim != state.n:
            raise ValueError("approximating matrix dimension mismatch")
        super().__init__(state.n)
        self._state = state
        self._a0 = a0

    @property
    def a0(self):
        return self._a0

    def apply(self, v):
        v = _as_vector(v, self.dim)
        self._bump()
        return self._eval(v, self._a0.apply)

    def _matvec(self, v):
        return self._eval(v, self._a0._matvec)

    def _eval(self, v, a0_product):
        state = self._state
        if state.k == 0:
            return a0_product(v)
        vv = state.V.T @ v
        projected = v - state.V @ vv
        a0p = a0_product(projected)
        a0p -= state.V @ (state.V.T @ a0p)
        return (-state.V @ (state.M @ vv) + state.W @ vv
                + state.V @ (state.W.T @ v) + a0p)


def spam_apply(op, v):
    """Counted product with a SpamOperator (convenience alias)."""
    return op.apply(v)


def dense_spam_matrix(state, a0, cap=DENSIFY_CAP):
    """Dense materialization of the projected approximate matrix.

    Used by the exact inner eigensolver and by test oracles; the implicit
    operator never forms this during subspace expansion.
    """
    a0d = a0.to_dense(cap)
    if state.k == 0:
        return a0d
    v, w, m = state.V, state.W, state.M
    p = np.eye(state.n) - v @ v.T
    ak = -v @ m @ v.T + w @ v.T + v @ w.T + p @ a0d @ p
    return 0.5 * (ak + ak.T)


def rank2_update_vectors(state_prev, v, operator, a0):
    """The pair (u, v) with A_k = A_{k-1} + u v^T + v u^T.

    ``state_prev`` is the state before the expansion and ``v`` the
    orthonormal column that was (or is about to be) appended. The vector u
    is the projection (I - V V^T - v v^T / 2) applied to (A - A0) v.
    """
    v = _as_vector(v, state_prev.n)
    d = operator.apply(v) - a0.apply(v)
    if state_prev.k:
        d_proj = d - state_prev.V @ (state_prev.V.T @ d)
    else:
        d_proj = d
    u = d_proj - 0.5 * (v @ d) * v
    return u, v


def harmonic_ritz(state):
    """Positive spectrum of the harmonic companion of the projected block.

    Computed as the eigenvalues of U M^{-1} U^T where U is the upper
    Cholesky factor of M^2 + Rhat^T Rhat; the Gram identity makes this
    equal to the factor of the inaccessible [M; R] block without forming an
    orthonormal completion of the basis. Requires M to be invertible (the
    operator positive definite on the search space); values driven slightly
    negative by rounding are clamped to zero. Returned in descending order.
    """
    if state.k < 1:
        raise ValueError("harmonic values need a nonempty search space")
    m = state.M
    m_eigs = np.linalg.eigvalsh(m)
    # Gauge singularity against the operator's action on the space, not
    # against M itself: a 1 x 1 block is always well conditioned relative
    # to its own scale.
    gauge = np.linalg.norm(state.W, 2)
    if gauge == 0.0 or np.abs(m_eigs).min() <= 1e-12 * gauge:
        raise ValueError(
            "projected block is numerically singular; shift the operator "
            "before requesting harmonic values")
    rhat = state.residual_matrix()
    gram = m @ m + rhat.T @ rhat
    gram = 0.5 * (gram + gram.T)
    upper = np.linalg.cholesky(gram).T
    t = upper @ np.linalg.solve(m, upper.T)
    values = np.linalg.eigvalsh(0.5 * (t + t.T))
    clamp_floor = -1e-12 * max(values.max(), 0.0)
    if values.min() < clamp_floor:
        raise ValueError("harmonic spectrum is not positive; the operator "
                         "is not positive definite on the search space")
    if values.min() < 0.0:
        warnings.warn("clamped slightly negative harmonic values to zero",
                      RuntimeWarning, stacklevel=2)
        values = np.maximum(values, 0.0)
    return values[::-1].copy()

import numpy as np
import pytest

from spameig import DenseOperator, SearchState, expand_state, orthonormalize_against


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_spd(rng, n, lam_min=0.5, lam_max=8.0):
    """Dense SPD operator with a controlled spectrum."""
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    lam = np.sort(rng.uniform(lam_min, lam_max, n))
    return DenseOperator(q @ np.diag(lam) @ q.T)


def random_symmetric(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return DenseOperator(scale * 0.5 * (a + a.T))


def random_indefinite(rng, n, lam_abs=(0.3, 5.0)):
    """Symmetric operator with eigenvalues of both signs, well conditioned."""
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    lam = rng.uniform(*lam_abs, n) * rng.choice([-1.0, 1.0], n)
    return DenseOperator(q @ np.diag(lam) @ q.T)


def grow_state(a, vectors):
    """Build a SearchState by orthonormalizing and appending each vector."""
    state = SearchState(a.dim)
    for v in vectors:
        q, lost = orthonormalize_against(v, state.V)
        if lost:
            raise AssertionError("test basis collapsed")
        expand_state(state, q, a)
    return state


def complete_basis(v):
    """Extend the orthonormal columns of v to a full orthogonal matrix."""
    n = v.shape[0]
    basis = v.copy()
    j = 0
    while basis.shape[1] < n and j < n:
        q, lost = orthonormalize_against(np.eye(n)[:, j], basis)
        j += 1
        if lost:
            continue
        basis = np.column_stack([basis, q])
    assert basis.shape == (n, n)
    return basis

import numpy as np
import pytest

from spameig import (
    DenseOperator,
    DensifyCapError,
    DiagonalOperator,
    LowRankOperator,
    ShiftedNegatedOperator,
    SparseOperator,
    orthonormalize_against,
    sym_eig,
    zero_operator,
)

from conftest import random_symmetric


def all_representations(rng, n=12):
    """One operator of every representation, all desk sized."""
    dense = random_symmetric(rng, n)
    tri = np.tril(rng.standard_normal((n, n)))
    rows, cols = np.nonzero(tri)
    sparse = SparseOperator(n, rows, cols, tri[rows, cols])
    diag = DiagonalOperator(rng.standard_normal(n))
    b = rng.standard_normal((n, 4))
    c = rng.standard_normal((4, 4))
    lowrank = LowRankOperator(b, 0.5 * (c + c.T))
    shifted = ShiftedNegatedOperator(3.0, dense)
    return [dense, sparse, diag, lowrank, shifted, zero_operator(n)]


class TestApply:
    def test_diagonal_action(self):
        op = DiagonalOperator([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(op.apply(np.ones(3)), [1.0, 2.0, 3.0])

    def test_zero_operator(self, rng):
        op = zero_operator(5)
        np.testing.assert_array_equal(op.apply(rng.standard_normal(5)), np.zeros(5))

    def test_banded_display_matrix(self):
        # 4x4 with diagonal 1..4, eps on the first band and eps^2 on the
        # second, eps = 0.5; applied to the first basis vector.
        eps = 0.5
        rows = [0, 1, 2, 3, 1, 2, 3, 2, 3]
        cols = [0, 1, 2, 3, 0, 1, 2, 0, 1]
        vals = [1, 2, 3, 4, eps, eps, eps, eps**2, eps**2]
        op = SparseOperator(4, rows, cols, vals)
        e1 = np.array([1.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(op.apply(e1), [1.0, 0.5, 0.25, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            DiagonalOperator([1.0, 2.0]).apply(np.ones(3))

    def test_counter_is_exact(self, rng):
        op = random_symmetric(rng, 6)
        for t in range(1, 8):
            op.apply(rng.standard_normal(6))
            assert op.matvec_count == t
        op.reset_matvec_count()
        assert op.matvec_count == 0

    def test_shifted_forwards_counts(self, rng):
        inner = random_symmetric(rng, 5)
        wrapped = ShiftedNegatedOperator(2.0, inner)
        wrapped.apply(rng.standard_normal(5))
        wrapped.apply(rng.standard_normal(5))
        assert inner.matvec_count == 2
        assert wrapped.matvec_count == 2


class TestToDense:
    def test_diagonal(self):
        np.testing.assert_array_equal(
            DiagonalOperator([1.0, 2.0]).to_dense(), [[1.0, 0.0], [0.0, 2.0]])

    def test_shifted_negated(self, rng):
        a = random_symmetric(rng, 6)
        np.testing.assert_allclose(
            ShiftedNegatedOperator(6.0, a).to_dense(),
            6.0 * np.eye(6) - a.to_dense())

    def test_sparse_symmetric_completion(self):
        op = SparseOperator(2, [1], [0], [0.5])
        np.testing.assert_array_equal(op.to_dense(), [[0.0, 0.5], [0.5, 0.0]])

    def test_cap_refusal(self, rng):
        op = DiagonalOperator(np.ones(10))
        with pytest.raises(DensifyCapError):
            op.to_dense(cap=9)

    def test_apply_matches_dense(self, rng):
        for op in all_representations(rng):
            dense = op.to_dense()
            scale = max(np.abs(dense).max(), 1.0)
            for _ in range(5):
                x = rng.standard_normal(op.dim)
                np.testing.assert_allclose(op.apply(x), dense @ x,
                                           atol=1e-13 * scale * np.linalg.norm(x))


class TestSymmetry:
    def test_random_probing(self, rng):
        for op in all_representations(rng):
            norm1 = max(op.norm1_estimate(), 1e-30)
            for _ in range(10):
                x = rng.standard_normal(op.dim)
                y = rng.standard_normal(op.dim)
                lhs = x @ op.apply(y)
                rhs = y @ op.apply(x)
                bound = 1e-12 * np.linalg.norm(x) * np.linalg.norm(y) * norm1
                assert abs(lhs - rhs) <= max(bound, 1e-300)

    def test_dense_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            DenseOperator([[1.0, 2.0], [0.0, 1.0]])

    def test_sparse_rejects_upper_triangle(self):
        with pytest.raises(ValueError):
            SparseOperator(3, [0], [2], [1.0])

    def test_sparse_sums_duplicates(self):
        op = SparseOperator(2, [1, 1], [0, 0], [0.25, 0.25])
        np.testing.assert_array_equal(op.to_dense(), [[0.0, 0.5], [0.5, 0.0]])


class TestSymEig:
    def test_identity(self):
        dec = sym_eig(np.eye(3))
        np.testing.assert_allclose(dec.values, [1.0, 1.0, 1.0])

    def test_exchange_matrix(self):
        dec = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(dec.values, [-1.0, 1.0], atol=1e-15)
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        for j, expect in enumerate(([-inv_sqrt2, inv_sqrt2],
                                    [inv_sqrt2, inv_sqrt2])):
            v = dec.vectors[:, j]
            if v[1] < 0:
                v = -v
            np.testing.assert_allclose(v, expect, atol=1e-15)

    def test_arrowhead_nontrivial_pair(self, rng):
        # Arrowhead with zero shoulder and unit border: nonzero eigenvalues
        # must be mu/2 +- sqrt(mu^2/4 + ||r||^2) with mu = 0.
        r = rng.standard_normal(3)
        r /= np.linalg.norm(r)
        s = np.zeros((4, 4))
        s[0, 1:] = r
        s[1:, 0] = r
        dec = sym_eig(s)
        np.testing.assert_allclose(dec.values[0], -1.0, atol=1e-14)
        np.testing.assert_allclose(dec.values[-1], 1.0, atol=1e-14)
        np.testing.assert_allclose(dec.values[1:-1], 0.0, atol=1e-14)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sym_eig(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_reconstruction_and_orthonormality(self, rng):
        for _ in range(100):
            m = int(rng.integers(1, 51))
            a = rng.standard_normal((m, m))
            s = 0.5 * (a + a.T)
            dec = sym_eig(s)
            assert np.all(np.diff(dec.values) >= 0)
            q = dec.vectors
            assert np.abs(q.T @ q - np.eye(m)).max() <= 1e-12
            recon = q @ np.diag(dec.values) @ q.T
            denom = max(np.linalg.norm(s), 1e-30)
            assert np.linalg.norm(recon - s) <= 1e-11 * denom


class TestOrthonormalize:
    def test_already_orthogonal(self):
        basis = np.eye(3)[:, :1]
        q, lost = orthonormalize_against(np.array([0.0, 1.0, 0.0]), basis)
        assert not lost
        np.testing.assert_allclose(q, [0.0, 1.0, 0.0])

    def test_vector_in_span_is_lost(self):
        basis = np.eye(3)[:, :1]
        _, lost = orthonormalize_against(np.array([1.0, 0.0, 0.0]), basis)
        assert lost

    def test_hand_gram_schmidt(self):
        basis = np.eye(3)[:, :1]
        v = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
        q, lost = orthonormalize_against(v, basis)
        assert not lost
        np.testing.assert_allclose(q, [0.0, 1.0, 0.0], atol=1e-15)

    def test_zero_vector_is_lost(self):
        _, lost = orthonormalize_against(np.zeros(3), np.eye(3)[:, :1])
        assert lost

    def test_stream_keeps_orthonormality(self, rng):
        n = 40
        basis = np.empty((n, 0))
        while basis.shape[1] < n:
            q, lost = orthonormalize_against(rng.standard_normal(n), basis)
            assert not lost
            basis = np.column_stack([basis, q])
        gram = basis.T @ basis
        assert np.abs(gram - np.eye(n)).max() <= 1e-12

    def test_reorthogonalization_kicks_in(self, rng):
        # Nearly dependent input forces the DGKS second pass; the result
        # must still be orthogonal to working precision.
        n = 30
        basis = np.linalg.qr(rng.standard_normal((n, n - 1)))[0]
        v = basis @ rng.standard_normal(n - 1)
        v += 1e-6 * rng.standard_normal(n)
        q, lost = orthonormalize_against(v, basis)
        assert not lost
        assert np.abs(basis.T @ q).max() <= 1e-12

"""Symmetric linear operators and the dense kernels every solver consumes.

Operators expose a counted ``apply`` (the unit of cost accounting in all
convergence experiments) plus a few structural queries: dense
materialization, diagonal, coordinate entries and a one-norm estimate.
All arithmetic is real double precision.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from spameig.kernels import csr_matvec

#: Largest dimension for which dense materialization is permitted.
DENSIFY_CAP = 4096

#: Relative threshold below which a projected vector counts as lost.
BREAKDOWN_RTOL = 1e-10


class DensifyCapError(RuntimeError):
    """A dense materialization was requested above the configured cap."""


def _as_vector(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {x.shape}")
    return x


class SymmetricOperator:
    """Real symmetric linear map with an observable matvec counter.

    Subclasses implement ``_matvec`` (the raw kernel, never counted) and
    the structural queries. ``apply`` is the public counted entry point;
    cost accounting reads ``matvec_count``. Instances are immutable after
    construction except for the counter, which is lock protected so shared
    operators can be probed from concurrent runs.
    """

    def __init__(self, dim):
        dim = int(dim)
        if dim < 1:
            raise ValueError("operator dimension must be positive")
        self._dim = dim
        self._count = 0
        self._count_lock = threading.Lock()

    @property
    def dim(self):
        return self._dim

    @property
    def matvec_count(self):
        return self._count

    def reset_matvec_count(self):
        with self._count_lock:
            self._count = 0

    def _bump(self):
        with self._count_lock:
            self._count += 1

    def apply(self, x):
        """Counted matrix-vector product."""
        x = _as_vector(x, self._dim)
        self._bump()
        return self._matvec(x)

    def _matvec(self, x):
        """Raw kernel, outside the matvec accounting."""
        raise NotImplementedError

    def to_dense(self, cap=DENSIFY_CAP):
        """Materialize as a symmetric dense array (refused above ``cap``)."""
        if self._dim > cap:
            raise DensifyCapError(
                f"dimension {self._dim} exceeds densification cap {cap}"
            )
        return self._dense()

    def _dense(self):
        # Generic column-by-column fallback; subclasses do better.
        basis = np.eye(self._dim)
        a = np.column_stack([self._matvec(basis[:, j]) for j in range(self._dim)])
        return 0.5 * (a + a.T)

    def diagonal(self):
        out = np.empty(self._dim)
        e = np.zeros(self._dim)
        for i in range(self._dim):
            e[i] = 1.0
            out[i] = self._matvec(e)[i]
            e[i] = 0.0
        return out

    def lower_entries(self):
        """Coordinate entries (rows, cols, values) of the lower triangle."""
        a = self.to_dense()
        rows, cols = np.nonzero(np.tril(a))
        return rows, cols, a[rows, cols]

    def norm1_estimate(self):
        """Estimate (here: exact, via densification) of the one-norm."""
        return float(np.abs(self._dense()).sum(axis=0).max()) if self._dim else 0.0


class DenseOperator(SymmetricOperator):
    """Operator backed by an explicit symmetric array."""

    def __init__(self, matrix, symmetry_rtol=1e-12):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        scale = np.abs(a).max() if a.size else 0.0
        if scale and np.abs(a - a.T).max() > symmetry_rtol * scale:
            raise ValueError("matrix is not symmetric within tolerance")
        super().__init__(a.shape[0])
        self._a = 0.5 * (a + a.T)

    def _matvec(self, x):
        return self._a @ x

    def _dense(self):
        return self._a.copy()

    def diagonal(self):
        return np.diag(self._a).copy()

    def norm1_estimate(self):
        return float(np.abs(self._a).sum(axis=0).max())


class SparseOperator(SymmetricOperator):
    """Sparse symmetric operator.

    Construction takes the lower triangle in coordinate form (row >= col,
    0-based, duplicates summed). Internally the full symmetric pattern is
    assembled once into CSR arrays for the matvec kernel; the canonical
    lower-triangle entries stay available for structural work (band
    filtering, file output, nonzero counts).
    """

    def __init__(self, dim, rows, cols, values):
        super().__init__(dim)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if not (rows.shape == cols.shape == values.shape) or rows.ndim != 1:
            raise ValueError("rows, cols and values must be 1-d and equally long")
        if rows.size:
            if rows.min() < 0 or rows.max() >= dim or cols.min() < 0:
                raise ValueError("entry index out of range")
            if np.any(cols > rows):
                raise ValueError("entries must lie in the lower triangle (row >= col)")
        # Canonicalize: sum duplicates, sort row-major. Explicit zeros are
        # kept so nonzero counts match whatever the caller stored.
        keys = rows * dim + cols
        uniq, inverse = np.unique(keys, return_inverse=True)
        vals = np.bincount(inverse, weights=values, minlength=uniq.size)
        self._rows = uniq // dim
        self._cols = uniq % dim
        self._vals = vals
        # Full-pattern CSR for the kernel.
        off = self._rows != self._cols
        fr = np.concatenate([self._rows, self._cols[off]])
        fc = np.concatenate([self._cols, self._rows[off]])
        fv = np.concatenate([self._vals, self._vals[off]])
        order = np.lexsort((fc, fr))
        self._indices = fc[order]
        self._data = fv[order]
        counts = np.bincount(fr, minlength=dim)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    @property
    def nnz_lower(self):
        """Number of stored lower-triangle entries."""
        return self._vals.size

    @property
    def nnz(self):
        """Number of stored entries counting both triangles."""
        return self._data.size

    def csr_arrays(self):
        """Full-pattern CSR arrays (indptr, indices, data); do not mutate."""
        return self._indptr, self._indices, self._data

    def lower_entries(self):
        return self._rows.copy(), self._cols.copy(), self._vals.copy()

    def _matvec(self, x):
        return csr_matvec(self._indptr, self._indices, self._data, x)

    def _dense(self):
        a = np.zeros((self.dim, self.dim))
        a[self._rows, self._cols] = self._vals
        a[self._cols, self._rows] = self._vals
        return a

    def diagonal(self):
        d = np.zeros(self.dim)
        on_diag = self._rows == self._cols
        d[self._rows[on_diag]] = self._vals[on_diag]
        return d

    def norm1_estimate(self):
        if self._data.size == 0:
            return 0.0
        return float(np.bincount(self._indices, weights=np.abs(self._data),
                                 minlength=self.dim).max())


class DiagonalOperator(SymmetricOperator):
    """Operator backed by a diagonal vector."""

    def __init__(self, diag):
        d = np.asarray(diag, dtype=float)
        if d.ndim != 1:
            raise ValueError("diagonal must be a vector")
        super().__init__(d.shape[0])
        self._d = d.copy()

    def _matvec(self, x):
        return self._d * x

    def _dense(self):
        return np.diag(self._d)

    def diagonal(self):
        return self._d.copy()

    def lower_entries(self):
        idx = np.arange(self.dim, dtype=np.int64)
        keep = self._d != 0
        return idx[keep], idx[keep], self._d[keep].copy()

    def norm1_estimate(self):
        return float(np.abs(self._d).max()) if self.dim else 0.0


class LowRankOperator(SymmetricOperator):
    """Symmetric product form B C B^T with B of shape (n, m).

    m = 0 yields the zero operator.
    """

    def __init__(self, b, c, symmetry_rtol=1e-12):
        b = np.asarray(b, dtype=float)
        c = np.asarray(c, dtype=float)
        if b.ndim != 2 or c.shape != (b.shape[1], b.shape[1]):
            raise ValueError("factor shapes must be (n, m) and (m, m)")
        scale = np.abs(c).max() if c.size else 0.0
        if scale and np.abs(c - c.T).max() > symmetry_rtol * scale:
            raise ValueError("core factor is not symmetric within tolerance")
        super().__init__(b.shape[0])
        self._b = b.copy()
        self._c = 0.5 * (c + c.T) if c.size else c.copy()

    @property
    def rank_bound(self):
        return self._b.shape[1]

    def _matvec(self, x):
        return self._b @ (self._c @ (self._b.T @ x))

    def _dense(self):
        a = self._b @ self._c @ self._b.T
        return 0.5 * (a + a.T)

    def diagonal(self):
        if self._b.shape[1] == 0:
            return np.zeros(self.dim)
        return np.einsum("im,mk,ik->i", self._b, self._c, self._b)


def zero_operator(dim):
    """The n x n zero operator (rank-0 low-rank form)."""
    return LowRankOperator(np.zeros((dim, 0)), np.zeros((0, 0)))


class ShiftedNegatedOperator(SymmetricOperator):
    """Wrapper representing alpha * I - inner.

    Matvec counts forward to the inner operator: a product with
    alpha * I - A costs exactly one product with A.
    """

    def __init__(self, alpha, inner):
        super().__init__(inner.dim)
        self._alpha = float(alpha)
        self._inner = inner

    @property
    def alpha(self):
        return self._alpha

    @property
    def inner(self):
        return self._inner

    @property
    def matvec_count(self):
        return self._inner.matvec_count

    def reset_matvec_count(self):
        self._inner.reset_matvec_count()

    def apply(self, x):
        x = _as_vector(x, self.dim)
        return self._alpha * x - self._inner.apply(x)

    def _matvec(self, x):
        return self._alpha * x - self._inner._matvec(x)

    def _dense(self):
        return self._alpha * np.eye(self.dim) - self._inner._dense()

    def diagonal(self):
        return self._alpha - self._inner.diagonal()

    def lower_entries(self):
        rows, cols, vals = self._inner.lower_entries()
        idx = np.arange(self.dim, dtype=np.int64)
        rows = np.concatenate([rows, idx])
        cols = np.concatenate([cols, idx])
        vals = np.concatenate([-vals, np.full(self.dim, self._alpha)])
        return rows, cols, vals

    def norm1_estimate(self):
        return abs(self._alpha) + self._inner.norm1_estimate()


@dataclass
class EigenDecomposition:
    """Full symmetric eigendecomposition, values ascending.

    ``vectors[:, j]`` belongs to ``values[j]``.
    """

    values: np.ndarray
    vectors: np.ndarray


def sym_eig(s, symmetry_rtol=1e-12):
    """Dense symmetric eigendecomposition with an explicit symmetry gate.

    Raises ValueError when the input deviates from symmetry by more than
    ``symmetry_rtol`` relative to its largest entry.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 1:
        raise ValueError("input must be a square matrix of order >= 1")
    scale = np.abs(s).max()
    if scale and np.abs(s - s.T).max() > symmetry_rtol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    values, vectors = np.linalg.eigh(0.5 * (s + s.T))
    return EigenDecomposition(values, vectors)


def orthonormalize_against(v, basis, breakdown_rtol=BREAKDOWN_RTOL):
    """Orthonormalize ``v`` against the orthonormal columns of ``basis``.

    Modified Gram-Schmidt with one full re-orthogonalization pass whenever
    the first pass loses more than a factor 1/sqrt(2) of the norm (DGKS
    criterion). Returns ``(q, lost)``; ``lost`` is True when the projected
    remainder falls below ``breakdown_rtol`` times the input norm, in which
    case ``q`` is the unnormalized remainder and must not be used.
    """
    v = np.asarray(v, dtype=float)
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[0] != v.shape[0]:
        raise ValueError("basis must be (n, k) with n matching the vector")
    norm0 = np.linalg.norm(v)
    if norm0 == 0.0:
        return v.copy(), True
    q = v.copy()
    for j in range(basis.shape[1]):
        q -= (basis[:, j] @ q) * basis[:, j]
    norm1 = np.linalg.norm(q)
    if norm1 < norm0 / np.sqrt(2.0):
        for j in range(basis.shape[1]):
            q -= (basis[:, j] @ q) * basis[:, j]
        norm1 = np.linalg.norm(q)
    if norm1 <= breakdown_rtol * norm0:
        return q, True
    return q / norm1, False

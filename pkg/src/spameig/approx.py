"""Constructors for approximating matrices and from-below certification.

An approximating matrix is "from below" when its difference from the target
matrix is positive semi-definite. The algebraic construction subtracts the
Rayleigh-Ritz restriction of the matrix to a set of coordinate directions,
which zeroes the corresponding block and bounds the rank of the remainder
by twice the number of retained directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spameig.linop import (
    DENSIFY_CAP,
    DiagonalOperator,
    SparseOperator,
    zero_operator,
)


@dataclass(frozen=True)
class ApproxSpec:
    """Recipe for an approximating matrix; use the classmethod constructors."""

    kind: str
    alpha: float | None = None
    q0: int | None = None
    m: int | None = None
    indices: tuple | None = None

    @classmethod
    def zero(cls):
        return cls(kind="zero")

    @classmethod
    def scaled_identity(cls, alpha):
        return cls(kind="scaled_identity", alpha=float(alpha))

    @classmethod
    def diagonal_part(cls):
        return cls(kind="diagonal_part")

    @classmethod
    def band_cutoff(cls, q0):
        if q0 < 0:
            raise ValueError("band cutoff width must be nonnegative")
        return cls(kind="band_cutoff", q0=int(q0))

    @classmethod
    def algebraic_from_below(cls, m=None, indices=None):
        """From-below approximation zeroing a diagonal-selected block.

        ``m`` is the number of retained directions (the largest diagonal
        entries); the remaining n - m indices are folded into the
        subtracted block. ``indices`` instead fixes the folded index set
        explicitly.
        """
        if (m is None) == (indices is None):
            raise ValueError("give exactly one of m or indices")
        if indices is not None:
            indices = tuple(int(i) for i in indices)
        else:
            m = int(m)
            if m < 0:
                raise ValueError("retained size m must be nonnegative")
        return cls(kind="algebraic_from_below", m=m, indices=indices)


def _folded_index_set(a, spec):
    diag = a.diagonal()
    n = a.dim
    if spec.indices is not None:
        idx = np.asarray(spec.indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("index list out of range")
        if np.unique(idx).size != idx.size:
            raise ValueError("index list contains duplicates")
        return idx
    if spec.m >= n:
        raise ValueError("retained size m must be smaller than the dimension")
    # Fold the n - m smallest diagonal entries; stable sort breaks ties
    # toward the lowest index.
    order = np.argsort(diag, kind="stable")
    return order[: n - spec.m]


def build_approx(a, spec):
    """Build the approximating matrix prescribed by ``spec`` for ``a``."""
    n = a.dim
    if spec.kind == "zero":
        return zero_operator(n)
    if spec.kind == "scaled_identity":
        return DiagonalOperator(np.full(n, spec.alpha))
    if spec.kind == "diagonal_part":
        return DiagonalOperator(a.diagonal())
    if spec.kind == "band_cutoff":
        rows, cols, vals = a.lower_entries()
        keep = (rows - cols) <= spec.q0
        return SparseOperator(n, rows[keep], cols[keep], vals[keep])
    if spec.kind == "algebraic_from_below":
        folded = _folded_index_set(a, spec)
        mask = np.zeros(n, dtype=bool)
        mask[folded] = True
        rows, cols, vals = a.lower_entries()
        keep = ~(mask[rows] & mask[cols])
        return SparseOperator(n, rows[keep], cols[keep], vals[keep])
    raise ValueError(f"unknown approximation kind {spec.kind!r}")


def certify_from_below(a, a0, tol, cap=DENSIFY_CAP):
    """True iff the smallest eigenvalue of a - a0 is at least -tol.

    Dense check, so the densification cap applies.
    """
    diff = a.to_dense(cap) - a0.to_dense(cap)
    return bool(np.linalg.eigvalsh(0.5 * (diff + diff.T)).min() >= -tol)

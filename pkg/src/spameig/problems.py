"""Test-problem generators and Matrix Market file I/O."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spameig.linop import DiagonalOperator, SparseOperator


@dataclass(frozen=True)
class BandedSpec:
    """Banded test matrix: diagonal 1..n, half-bandwidth q, decay eps."""

    n: int
    q: int
    eps: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        if not 1 <= self.q <= self.n - 1:
            raise ValueError("half-bandwidth must satisfy 1 <= q <= n - 1")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError("eps must lie in [0, 1]")


def gen_banded(spec, literal_exponent=False):
    """Banded matrix with diagonal 1..n and decaying off-diagonal bands.

    The band at distance d carries eps**d for 1 <= d <= q (geometric decay,
    matching the worked 4x4 example and the cutoff bound derivation).
    ``literal_exponent=True`` instead puts the constant eps**q on every
    band, the alternative flat reading of the defining formula.
    """
    n, q, eps = spec.n, spec.q, spec.eps
    rows = [np.arange(n, dtype=np.int64)]
    cols = [np.arange(n, dtype=np.int64)]
    vals = [np.arange(1.0, n + 1.0)]
    for d in range(1, q + 1):
        value = eps ** q if literal_exponent else eps ** d
        if value == 0.0:
            continue
        rows.append(np.arange(d, n, dtype=np.int64))
        cols.append(np.arange(0, n - d, dtype=np.int64))
        vals.append(np.full(n - d, value))
    return SparseOperator(n, np.concatenate(rows), np.concatenate(cols),
                          np.concatenate(vals))


@dataclass(frozen=True)
class ReactionDiffusionSpec:
    """1-d diffusion-reaction eigenproblem on the unit interval.

    ``n`` interior grid points with Dirichlet walls, grid size
    h = 1/(n + 1). The diffusion coefficient equals h**2, which scales the
    stencil to exactly tridiag(-1, 2, -1).
    """

    n: int = 32

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 interior grid points")

    @property
    def h(self):
        return 1.0 / (self.n + 1)

    @property
    def eps_param(self):
        return self.h ** 2

    def reaction(self, x):
        return x * (1.0 - x) * np.exp(3.0 * x)


def gen_reaction_diffusion_1d(spec):
    """Discretize the 1-d problem; returns (A, D, R) with A = D + R.

    D is the scaled tridiagonal diffusion, R the diagonal reaction sampled
    at the interior points. The parts are returned separately so the
    reaction term can serve as the approximating matrix.
    """
    n = spec.n
    grid = spec.h * np.arange(1, n + 1)
    r_diag = spec.reaction(grid)

    idx = np.arange(n, dtype=np.int64)
    d_rows = np.concatenate([idx, idx[1:]])
    d_cols = np.concatenate([idx, idx[1:] - 1])
    d_vals = np.concatenate([np.full(n, 2.0), np.full(n - 1, -1.0)])
    d_op = SparseOperator(n, d_rows, d_cols, d_vals)

    a_rows = np.concatenate([d_rows, idx])
    a_cols = np.concatenate([d_cols, idx])
    a_vals = np.concatenate([d_vals, r_diag])
    a_op = SparseOperator(n, a_rows, a_cols, a_vals)

    return a_op, d_op, DiagonalOperator(r_diag)


class MatrixMarketError(ValueError):
    """Matrix Market parse failure carrying the offending 1-based line."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_MM_HEADER = ("matrix", "coordinate", "real", "symmetric")


def load_matrix_market(path):
    """Load a coordinate real symmetric Matrix Market file.

    The stored lower triangle is completed symmetrically; duplicate entries
    are summed. Malformed input raises MatrixMarketError naming the line.
    """
    with open(path, "r", encoding="ascii") as handle:
        lines = handle.read().splitlines()

    if not lines:
        raise MatrixMarketError(1, "empty file")
    tokens = lines[0].split()
    if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket":
        raise MatrixMarketError(1, "malformed Matrix Market header")
    qualifiers = tuple(t.lower() for t in tokens[1:])
    if qualifiers != _MM_HEADER:
        raise MatrixMarketError(
            1, "expected 'matrix coordinate real symmetric', got "
               f"'{' '.join(tokens[1:])}'")

    lineno = 1
    size_line = None
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        size_line = stripped
        break
    if size_line is None:
        raise MatrixMarketError(lineno, "missing size line")
    parts = size_line.split()
    if len(parts) != 3:
        raise MatrixMarketError(lineno, "size line must hold 'nrows ncols nnz'")
    try:
        nrows, ncols, nnz = (int(p) for p in parts)
    except ValueError:
        raise MatrixMarketError(lineno, "size line must hold three integers") from None
    if nrows != ncols:
        raise MatrixMarketError(lineno, "symmetric matrix must be square")
    if nrows < 1 or nnz < 0:
        raise MatrixMarketError(lineno, "invalid matrix dimensions")

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    count = 0
    for lineno, line in enumerate(lines[lineno:], start=lineno + 1):
        stripped = line.strip()
        if not stripped:
            continue
        if count >= nnz:
            raise MatrixMarketError(lineno, f"more than {nnz} entries")
        parts = stripped.split()
        if len(parts) != 3:
            raise MatrixMarketError(lineno, "entry must hold 'i j value'")
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise MatrixMarketError(lineno, "entry must hold two integers "
                                            "and a real value") from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise MatrixMarketError(lineno, f"index ({i}, {j}) out of bounds")
        if j > i:
            raise MatrixMarketError(
                lineno, "symmetric files must store the lower triangle (i >= j)")
        rows[count] = i - 1
        cols[count] = j - 1
        vals[count] = v
        count += 1
    if count != nnz:
        raise MatrixMarketError(len(lines), f"expected {nnz} entries, found {count}")
    return SparseOperator(nrows, rows, cols, vals)


def write_matrix_market(path, op, comments=()):
    """Write the lower triangle of a sparse operator in coordinate format.

    Values carry 17 significant digits so a read-back recovers every double
    bit-exactly. Entries are emitted row-major for deterministic output.
    """
    rows, cols, vals = op.lower_entries()
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("%%MatrixMarket matrix coordinate real symmetric\n")
        for comment in comments:
            handle.write(f"% {comment}\n")
        handle.write(f"{op.dim} {op.dim} {len(vals)}\n")
        for i, j, v in zip(rows, cols, vals):
            handle.write(f"{i + 1} {j + 1} {v:.17g}\n")


def bandcut_eig_bound(eps, q0, q, n):
    """Eigenvalue perturbation bound for cutting bands q0+1..q.

    Returns (eps**(q0+1) - eps**(q+1)) / (1 - eps) * sqrt(n), the geometric
    series form of the Bauer-Fike bound for the banded family generated by
    ``gen_banded``. Invalid at eps = 1.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("bound requires 0 <= eps < 1")
    if not 0 <= q0 < q:
        raise ValueError("band cut requires 0 <= q0 < q")
    if n < 1:
        raise ValueError("dimension must be positive")
    return (eps ** (q0 + 1) - eps ** (q + 1)) / (1.0 - eps) * math.sqrt(n)

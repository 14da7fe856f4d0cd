"""Pure numpy fallback for the CSR matvec kernel."""

import numpy as np


def csr_matvec(indptr, indices, data, x):
    """Return A @ x for a CSR matrix (indptr, indices, data)."""
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(rows, weights=data * x[indices], minlength=n)

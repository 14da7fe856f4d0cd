# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR matvec kernel.

The matrix is stored with its full symmetric pattern so the kernel is a
plain row-wise accumulation; symmetry handling happens once at assembly.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def csr_matvec(const cnp.int64_t[::1] indptr,
               const cnp.int64_t[::1] indices,
               const double[::1] data,
               const double[::1] x):
    """Return A @ x for a CSR matrix (indptr, indices, data)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, p
    cdef double acc
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        y[i] = acc
    return out

"""Matrix-vector kernels, compiled when available.

The Cython CSR kernel is preferred. A vectorized numpy fallback is selected
at import time when the extension has not been built, or when the
environment variable SPAMEIG_PURE_PYTHON=1 forces it (useful for the kernel
benchmark and for debugging).
"""

import os

if os.environ.get("SPAMEIG_PURE_PYTHON") == "1":
    from spameig.kernels._spmv_py import csr_matvec

    USING_COMPILED = False
else:
    try:
        from spameig.kernels._spmv import csr_matvec

        USING_COMPILED = True
    except ImportError:
        from spameig.kernels._spmv_py import csr_matvec

        USING_COMPILED = False

__all__ = ["csr_matvec", "USING_COMPILED"]

"""Time the compiled CSR kernel against the numpy fallback.

Builds banded matrices of growing size and reports per-matvec timings for
both kernel implementations plus the speedup. The compiled kernel must be
built (pip install -e . --no-build-isolation); otherwise only the fallback
column is meaningful.

Usage: python benchmarks/bench_spmv.py [--sizes 1000,10000,100000] [--band 5]
"""

import argparse
import timeit

import numpy as np

from spameig import BandedSpec, gen_banded
from spameig.kernels import USING_COMPILED
from spameig.kernels._spmv_py import csr_matvec as matvec_py

try:
    from spameig.kernels._spmv import csr_matvec as matvec_c
except ImportError:
    matvec_c = None


def time_kernel(fn, indptr, indices, data, x, repeats):
    best = min(timeit.repeat(lambda: fn(indptr, indices, data, x),
                             number=repeats, repeat=3))
    return best / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1000,10000,100000",
                        help="comma separated matrix dimensions")
    parser.add_argument("--band", type=int, default=5, help="half-bandwidth")
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"compiled kernel built: {matvec_c is not None} "
          f"(active at import: {USING_COMPILED})")
    header = f"{'n':>8}  {'nnz':>10}  {'fallback':>12}  {'compiled':>12}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        op = gen_banded(BandedSpec(n=n, q=min(args.band, n - 1), eps=0.5))
        indptr, indices, data = op.csr_arrays()
        x = np.random.default_rng(0).standard_normal(n)
        t_py = time_kernel(matvec_py, indptr, indices, data, x, args.repeats)
        if matvec_c is not None:
            np.testing.assert_allclose(matvec_c(indptr, indices, data, x),
                                       matvec_py(indptr, indices, data, x),
                                       atol=1e-12)
            t_c = time_kernel(matvec_c, indptr, indices, data, x, args.repeats)
            print(f"{n:>8}  {op.nnz:>10}  {t_py * 1e6:>10.1f}us  "
                  f"{t_c * 1e6:>10.1f}us  {t_py / t_c:>7.1f}x")
        else:
            print(f"{n:>8}  {op.nnz:>10}  {t_py * 1e6:>10.1f}us  "
                  f"{'n/a':>12}  {'n/a':>8}")


if __name__ == "__main__":
    main()

"""Eigensolvers built around the subspace projected approximate matrix.

A comparison family of symmetric eigensolvers (Lanczos, Jacobi-Davidson
variants and the subspace projected approximate matrix method) sharing one
outer Rayleigh-Ritz iteration, plus problem generators and a benchmark CLI.
"""

__version__ = "0.1.0"

from spameig.approx import ApproxSpec, build_approx, certify_from_below
from spameig.linop import (
    BREAKDOWN_RTOL,
    DENSIFY_CAP,
    DenseOperator,
    DensifyCapError,
    DiagonalOperator,
    EigenDecomposition,
    LowRankOperator,
    ShiftedNegatedOperator,
    SparseOperator,
    SymmetricOperator,
    orthonormalize_against,
    sym_eig,
    zero_operator,
)
from spameig.minres import AugmentedOperator, minres_fixed
from spameig.problems import (
    BandedSpec,
    MatrixMarketError,
    ReactionDiffusionSpec,
    bandcut_eig_bound,
    gen_banded,
    gen_reaction_diffusion_1d,
    load_matrix_market,
    write_matrix_market,
)
from spameig.solvers import (
    ConvergenceRecord,
    RitzPair,
    RunResult,
    SolverConfig,
    StartVector,
    Target,
    expand_full_spam,
    expand_jd,
    expand_lanczos,
    expand_spam1,
    rayleigh_ritz,
    resolve_start_vector,
    run_outer,
)
from spameig.spamop import (
    SearchState,
    SpamOperator,
    dense_spam_matrix,
    expand_state,
    harmonic_ritz,
    rank2_update_vectors,
    spam_apply,
)

__all__ = [
    "__version__",
    "ApproxSpec",
    "AugmentedOperator",
    "BandedSpec",
    "BREAKDOWN_RTOL",
    "ConvergenceRecord",
    "DENSIFY_CAP",
    "DenseOperator",
    "DensifyCapError",
    "DiagonalOperator",
    "EigenDecomposition",
    "LowRankOperator",
    "MatrixMarketError",
    "ReactionDiffusionSpec",
    "RitzPair",
    "RunResult",
    "SearchState",
    "ShiftedNegatedOperator",
    "SolverConfig",
    "SpamOperator",
    "SparseOperator",
    "StartVector",
    "SymmetricOperator",
    "Target",
    "bandcut_eig_bound",
    "build_approx",
    "certify_from_below",
    "dense_spam_matrix",
    "expand_full_spam",
    "expand_jd",
    "expand_lanczos",
    "expand_spam1",
    "expand_state",
    "gen_banded",
    "gen_reaction_diffusion_1d",
    "harmonic_ritz",
    "load_matrix_market",
    "minres_fixed",
    "orthonormalize_against",
    "rank2_update_vectors",
    "rayleigh_ritz",
    "resolve_start_vector",
    "run_outer",
    "spam_apply",
    "sym_eig",
    "write_matrix_market",
    "zero_operator",
]

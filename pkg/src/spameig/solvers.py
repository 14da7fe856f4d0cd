"""Outer Rayleigh-Ritz iteration with pluggable expansion strategies.

Every method shares the same outer loop: extract a Ritz pair from the
current search space, stop when its residual is small, otherwise produce an
expansion vector, orthonormalize it against the basis and grow the state.
The strategies differ only in the expansion vector:

* ``lanczos``    the current residual;
* ``fullspam``   the target eigenvector of the projected approximate
                 matrix, solved densely (exact inner solve);
* ``spam1``      one correction-equation step for the projected approximate
                 matrix, solved densely in augmented form;
* ``spam1l``     same correction equation, approximated with a fixed number
                 of MinRES steps;
* ``jd``         Jacobi-Davidson: the correction equation with the exact
                 matrix, a fixed number of MinRES steps;
* ``jd1``        Jacobi-Davidson with one-step approximation: the
                 correction equation with the approximating matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from spameig.linop import (
    DENSIFY_CAP,
    ShiftedNegatedOperator,
    orthonormalize_against,
    sym_eig,
    zero_operator,
)
from spameig.minres import AugmentedOperator, minres_fixed
from spameig.spamop import SearchState, SpamOperator, dense_spam_matrix, expand_state

STRATEGIES = ("lanczos", "fullspam", "spam1", "spam1l", "jd", "jd1")
_NEEDS_STEPS = ("spam1l", "jd", "jd1")


@dataclass(frozen=True)
class Target:
    """Which eigenvalue to chase.

    ``smallest_via_shift`` solves for the largest eigenvalue of
    alpha * I - A; the approximating matrix handed to the solver must then
    approximate the shifted matrix (build it after wrapping).
    """

    kind: str
    p: int = 1
    alpha: float = 0.0

    @classmethod
    def largest(cls):
        return cls(kind="largest")

    @classmethod
    def p_th_largest(cls, p):
        if p < 1:
            raise ValueError("p must be a 1-based index")
        return cls(kind="pth", p=int(p))

    @classmethod
    def smallest_via_shift(cls, alpha):
        return cls(kind="smallest", alpha=float(alpha))


@dataclass(frozen=True)
class StartVector:
    """Start vector policy: seeded random normal or an eigenvector of A0."""

    kind: str
    seed: int | None = None

    @classmethod
    def random(cls, seed):
        return cls(kind="random", seed=int(seed))

    @classmethod
    def eigvec_of_a0(cls):
        return cls(kind="eigvec")


@dataclass
class RitzPair:
    """Selected Ritz data: value, coefficients, lifted vector, residual."""

    value: float
    coeffs: np.ndarray
    vector: np.ndarray
    residual: np.ndarray
    resnorm: float


@dataclass(frozen=True)
class SolverConfig:
    strategy: str
    target: Target = field(default_factory=Target.largest)
    ell: int | None = None
    tol: float = 1e-10
    max_outer: int | None = None
    start: StartVector = field(default_factory=lambda: StartVector.random(0))
    inner_abstol: float | None = None
    densify_cap: int = DENSIFY_CAP

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy in _NEEDS_STEPS:
            if self.ell is None or self.ell < 1:
                raise ValueError(f"strategy {self.strategy!r} needs ell >= 1")

    @property
    def label(self):
        if self.strategy in _NEEDS_STEPS:
            return f"{self.strategy}{self.ell}"
        return self.strategy


@dataclass(frozen=True)
class ConvergenceRecord:
    """One outer iteration: subspace size, Ritz data and matvec counters."""

    outer_k: int
    ritz_value: float
    abs_error: float
    resnorm: float
    a_matvecs: int
    inner_matvecs: int


@dataclass
class RunResult:
    """Full run outcome: per-iteration records plus run-level metadata."""

    records: list
    converged: bool
    breakdown: bool
    iterations: int
    threshold: float
    reference_value: float
    seed: int | None
    label: str
    fallback_iterations: list
    state: SearchState


def rayleigh_ritz(state, target):
    """Extract the target Ritz pair from the current search space.

    The residual comes from the cached block W - V M, so no operator
    products are spent.
    """
    k = state.k
    if k < 1:
        raise ValueError("search space is empty")
    idx = _target_index(target, k)
    dec = sym_eig(state.M)
    y = dec.vectors[:, idx].copy()
    value = float(dec.values[idx])
    vector = state.V @ y
    residual = state.W @ y - state.V @ (state.M @ y)
    return RitzPair(value, y, vector, residual, float(np.linalg.norm(residual)))


def _target_index(target, size):
    # Index into an ascending spectrum of the given size.
    if target.kind == "largest":
        return size - 1
    if target.kind == "pth":
        if target.p > size:
            raise ValueError(f"cannot select the {target.p}-th largest of {size}")
        return size - target.p
    raise ValueError("resolve smallest_via_shift before spectrum selection")


def expand_lanczos(state, pair):
    """Residual expansion; the caller orthonormalizes (and detects breakdown)."""
    return pair.residual.copy()


def expand_full_spam(state, a0, target, cap=DENSIFY_CAP):
    """Target eigenvector of the densified projected approximate matrix."""
    ak = dense_spam_matrix(state, a0, cap)
    dec = sym_eig(ak)
    return dec.vectors[:, _target_index(target, state.n)].copy()


def _bordered_solve_dense(base_dense, mu, u, residual, perturb_scale):
    """Solve the bordered correction system densely, with one retry.

    A solve whose residual is off by more than 1e-8 relative signals a
    (near-)singular system; the shift is then perturbed once. Returns the
    correction block or None when both attempts fail.
    """
    n = base_dense.shape[0]
    rhs = np.concatenate([-residual, [0.0]])
    rhs_norm = np.linalg.norm(rhs)
    for shift in (mu, mu + perturb_scale):
        bordered = np.zeros((n + 1, n + 1))
        bordered[:n, :n] = base_dense - shift * np.eye(n)
        bordered[:n, n] = u
        bordered[n, :n] = u
        try:
            z = np.linalg.solve(bordered, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.linalg.norm(bordered @ z - rhs) <= 1e-8 * rhs_norm:
            return z[:n]
    return None


def expand_spam1(state, a0, pair, exact, ell=None, abstol=None,
                 cap=DENSIFY_CAP):
    """Correction-equation expansion for the projected approximate matrix.

    ``exact=True`` solves the bordered system densely; otherwise ``ell``
    MinRES steps run on the implicit augmented operator. Returns the
    correction vector, or None when the dense solve fails and the caller
    should fall back to the residual expansion.
    """
    if exact:
        ak = dense_spam_matrix(state, a0, cap)
        perturb = 1e-12 * max(1.0, float(np.abs(ak).sum(axis=0).max()))
        return _bordered_solve_dense(ak, pair.value, pair.vector,
                                     pair.residual, perturb)
    spam = SpamOperator(state, a0)
    aug = AugmentedOperator(spam, pair.value, pair.vector)
    rhs = np.concatenate([-pair.residual, [0.0]])
    x, _ = minres_fixed(aug, rhs, ell, abstol=abstol)
    return x[:-1]


def expand_jd(state, pair, base, ell=None, exact=False, abstol=None,
              cap=DENSIFY_CAP):
    """Jacobi-Davidson correction expansion against ``base``.

    ``base`` is the exact matrix for the plain method or the approximating
    matrix for the one-step-approximation variant.
    """
    if exact:
        perturb = 1e-12 * max(1.0, base.norm1_estimate())
        return _bordered_solve_dense(base.to_dense(cap), pair.value,
                                     pair.vector, pair.residual, perturb)
    aug = AugmentedOperator(base, pair.value, pair.vector)
    rhs = np.concatenate([-pair.residual, [0.0]])
    x, _ = minres_fixed(aug, rhs, ell, abstol=abstol)
    return x[:-1]


def resolve_start_vector(start, a0, target, n, cap=DENSIFY_CAP):
    """Materialize the configured start vector (not yet normalized)."""
    if start.kind == "random":
        rng = np.random.default_rng(start.seed)
        return rng.standard_normal(n)
    if start.kind == "eigvec":
        dec = sym_eig(a0.to_dense(cap))
        return dec.vectors[:, _target_index(target, n)].copy()
    raise ValueError(f"unknown start vector kind {start.kind!r}")


def run_outer(a, a0=None, config=None, start_vector=None, observer=None):
    """Drive the outer iteration until convergence, breakdown or the cap.

    ``a0`` defaults to the zero operator (which makes every strategy except
    ``jd`` behave like Lanczos). For a smallest-eigenvalue target the exact
    matrix is wrapped as alpha * I - A internally; ``a0`` is used as given
    and must approximate the wrapped matrix.

    For a p-th largest target the selected pair is clamped to the k-th
    largest while the subspace is still smaller than p, and the convergence
    test is deferred until the subspace can represent the target.

    ``observer``, when given, is called with (k, state, pair) after each
    Rayleigh-Ritz extraction. Returns a RunResult whose records hold one
    row per outer iteration.
    """
    if config is None:
        raise ValueError("config is required")
    target = config.target
    if target.kind == "smallest":
        a_eff = ShiftedNegatedOperator(target.alpha, a)
        select = Target.largest()
    else:
        a_eff = a
        select = target
    n = a_eff.dim
    if a0 is None:
        a0 = zero_operator(n)
    if a0.dim != n:
        raise ValueError("approximating matrix dimension mismatch")

    threshold = config.tol * max(1.0, a_eff.norm1_estimate())
    max_outer = min(config.max_outer or n, n)

    reference = np.nan
    if n <= config.densify_cap:
        spectrum = np.linalg.eigvalsh(a_eff.to_dense(config.densify_cap))
        reference = float(spectrum[_target_index(select, n)])

    if start_vector is None:
        start_vector = resolve_start_vector(config.start, a0, select, n,
                                            config.densify_cap)
    seed = config.start.seed if config.start.kind == "random" else None

    state = SearchState(n)
    q, lost = orthonormalize_against(start_vector, state.V)
    if lost:
        raise ValueError("start vector is numerically zero")
    expand_state(state, q, a_eff)

    records = []
    fallbacks = []
    converged = False
    breakdown = False
    while True:
        k = state.k
        clamped = select if select.kind == "largest" else Target.p_th_largest(
            min(select.p, k))
        pair = rayleigh_ritz(state, clamped)
        abs_error = abs(pair.value - reference) if np.isfinite(reference) else np.nan
        records.append(ConvergenceRecord(
            outer_k=k,
            ritz_value=pair.value,
            abs_error=abs_error,
            resnorm=pair.resnorm,
            a_matvecs=a_eff.matvec_count,
            inner_matvecs=a0.matvec_count,
        ))
        if observer is not None:
            observer(k, state, pair)
        target_reachable = select.kind == "largest" or k >= select.p
        if target_reachable and pair.resnorm <= threshold:
            converged = True
            break
        if k >= max_outer or k >= n:
            break

        raw = _expansion_vector(config, state, a0, a_eff, select, pair)
        if raw is None:
            raw = expand_lanczos(state, pair)
            fallbacks.append(k)
        q, lost = orthonormalize_against(raw, state.V)
        if lost and config.strategy != "lanczos":
            # Inner eigenvector already lies in the search space; expand
            # along the residual instead.
            raw = expand_lanczos(state, pair)
            fallbacks.append(k)
            q, lost = orthonormalize_against(raw, state.V)
        if lost:
            breakdown = True
            break
        expand_state(state, q, a_eff)

    return RunResult(
        records=records,
        converged=converged,
        breakdown=breakdown,
        iterations=records[-1].outer_k,
        threshold=threshold,
        reference_value=reference,
        seed=seed,
        label=config.label,
        fallback_iterations=fallbacks,
        state=state,
    )


def _expansion_vector(config, state, a0, a_eff, select, pair):
    strategy = config.strategy
    if strategy == "lanczos":
        return expand_lanczos(state, pair)
    if strategy == "fullspam":
        return expand_full_spam(state, a0, select, config.densify_cap)
    if strategy == "spam1":
        return expand_spam1(state, a0, pair, exact=True, cap=config.densify_cap)
    if strategy == "spam1l":
        return expand_spam1(state, a0, pair, exact=False, ell=config.ell,
                            abstol=config.inner_abstol)
    if strategy == "jd":
        return expand_jd(state, pair, a_eff, ell=config.ell,
                         abstol=config.inner_abstol)
    if strategy == "jd1":
        return expand_jd(state, pair, a0, ell=config.ell,
                         abstol=config.inner_abstol)
    raise ValueError(f"unknown strategy {strategy!r}")

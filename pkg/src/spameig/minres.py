"""Fixed-step MinRES for symmetric, possibly indefinite, systems.

Standard Lanczos recurrence with a Givens QR of the growing tridiagonal
matrix. The step count is the primary knob: correction equations in the
outer solvers run a fixed number of steps rather than iterating to a
tolerance, so the absolute tolerance only guards against wasted steps when
the system happens to be solved early.
"""

from __future__ import annotations

import math

import numpy as np

from spameig.linop import SymmetricOperator, _as_vector


class AugmentedOperator(SymmetricOperator):
    """Bordered symmetric map [[base - mu*I, u], [u^T, 0]] of size n + 1.

    Realizes correction equations in augmented form. Matvec counting
    forwards to the base operator, so each product with the bordered matrix
    is charged as exactly one product with the matrix it wraps.
    """

    def __init__(self, base, shift, border, norm_rtol=1e-8):
        border = _as_vector(border, base.dim)
        if abs(np.linalg.norm(border) - 1.0) > norm_rtol:
            raise ValueError("border vector must have unit norm")
        super().__init__(base.dim + 1)
        self._base = base
        self._shift = float(shift)
        self._border = border.copy()

    @property
    def base(self):
        return self._base

    @property
    def matvec_count(self):
        return self._base.matvec_count

    def reset_matvec_count(self):
        self._base.reset_matvec_count()

    def apply(self, x):
        x = _as_vector(x, self.dim)
        return self._combine(self._base.apply(x[:-1]), x)

    def _matvec(self, x):
        return self._combine(self._base._matvec(x[:-1]), x)

    def _combine(self, base_ax, x):
        xv, xi = x[:-1], x[-1]
        top = base_ax - self._shift * xv + xi * self._border
        return np.concatenate([top, [self._border @ xv]])

    def _dense(self):
        n = self._base.dim
        a = np.zeros((n + 1, n + 1))
        a[:n, :n] = self._base._dense() - self._shift * np.eye(n)
        a[:n, n] = self._border
        a[n, :n] = self._border
        return a

    def diagonal(self):
        return np.concatenate([self._base.diagonal() - self._shift, [0.0]])

    def norm1_estimate(self):
        return self._base.norm1_estimate() + abs(self._shift) + 1.0


def minres_fixed(op, rhs, steps, abstol=None, callback=None):
    """Run at most ``steps`` MinRES steps from the zero initial guess.

    Minimizes ``||rhs - op x||`` over the Krylov space of dimension equal
    to the number of steps taken. Exits early when the recurrence residual
    estimate drops to ``abstol`` (default ``1e-13 * ||rhs||``) or on Lanczos
    breakdown (new Krylov vector norm below ``1e-14 * ||rhs||``), in which
    case the Krylov space is invariant and the current iterate is returned.

    ``callback``, when given, is called once per step with the residual
    norm estimate. Returns ``(x, resnorm)`` where ``resnorm`` is the true
    residual norm recomputed at exit; the recompute uses the raw kernel and
    stays outside the matvec accounting, which charges exactly one counted
    apply per step.
    """
    rhs = _as_vector(rhs, op.dim)
    if steps < 1:
        raise ValueError("step count must be positive")
    beta1 = np.linalg.norm(rhs)
    if beta1 == 0.0:
        raise ValueError("right-hand side must be nonzero")
    if abstol is None:
        abstol = 1e-13 * beta1
    breakdown_tol = 1e-14 * beta1

    n = op.dim
    x = np.zeros(n)
    r1 = rhs
    r2 = rhs
    y = rhs
    oldb = 0.0
    beta = beta1
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    cs = -1.0
    sn = 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)

    for itn in range(1, steps + 1):
        v = y / beta
        y = op.apply(v)
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = v @ y
        y = y - (alfa / beta) * r2
        r1 = r2
        r2 = y
        oldb = beta
        beta = np.linalg.norm(y)
        breakdown = beta < breakdown_tol

        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(math.hypot(gbar, beta), np.finfo(float).tiny)
        cs = gbar / gamma
        sn = beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1 = w2
        w2 = w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w

        if callback is not None:
            callback(phibar)
        if breakdown or phibar <= abstol:
            break

    # Diagnostic recompute; uncounted so a solve with l steps costs
    # exactly l counted products.
    resnorm = float(np.linalg.norm(rhs - op._matvec(x)))
    return x, resnorm

"""Interior-point solver for small linear-matrix-inequality programs.

Solves

    minimize    c.T x
    subject to  F_j(x) = F_j0 + sum_i x_i F_ji  <=  0   (negative semidefinite)

by a log-det barrier method: phase 1 minimizes a scalar slack s with
F_j(x) <= s I until a strictly feasible point appears, then phase 2 follows
the central path of

    minimize  t c.T x - sum_j log det(-F_j(x) - eps_feas I)

with damped Newton steps, growing t by a factor of 10 per outer round until
the barrier gap sum_j dim_j / t drops below ``gap_target``.  Every block is
shifted by +eps_feas I internally, so the returned point satisfies
F_j(x) <= -eps_feas I strictly: certificates carry a checkable margin.

Problem sizes here are tiny (tens of variables, blocks of dimension <= 10),
so all linear algebra goes through the hand-rolled kernels in ``numerics``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import numerics


class InfeasibleError(RuntimeError):
    """Phase 1 converged with nonnegative slack: no strictly feasible point."""


class NumericalFailureError(RuntimeError):
    """Newton iteration stopped making progress."""


@dataclass(frozen=True)
class LmiBlock:
    """One affine matrix constraint F0 + sum x[var_idx[i]] * basis[i] <= 0."""

    label: str
    dim: int
    F0: np.ndarray
    var_idx: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        F0 = np.asarray(self.F0, dtype=float)
        basis = np.asarray(self.basis, dtype=float)
        var_idx = np.asarray(self.var_idx, dtype=int)
        if self.dim < 1 or F0.shape != (self.dim, self.dim):
            raise ValueError(f"block {self.label}: bad F0 shape {F0.shape}")
        if basis.shape != (len(var_idx), self.dim, self.dim):
            raise ValueError(f"block {self.label}: bad basis shape {basis.shape}")
        if not np.array_equal(F0, F0.T):
            raise ValueError(f"block {self.label}: F0 not symmetric")
        for k in range(basis.shape[0]):
            if not np.array_equal(basis[k], basis[k].T):
                raise ValueError(f"block {self.label}: basis {k} not symmetric")
        object.__setattr__(self, "F0", F0)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "var_idx", var_idx)

    def evaluate(self, x):
        F = self.F0.copy()
        if len(self.var_idx):
            F = F + np.tensordot(np.asarray(x)[self.var_idx], self.basis, axes=(0, 0))
        return F


@dataclass(frozen=True)
class LmiProblem:
    """Linear objective plus a list of affine semidefinite blocks."""

    n_vars: int
    c: np.ndarray
    blocks: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (self.n_vars,):
            raise ValueError(f"objective has shape {c.shape}, expected ({self.n_vars},)")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for b in self.blocks:
            if len(b.var_idx) and (b.var_idx.min() < 0 or b.var_idx.max() >= self.n_vars):
                raise ValueError(f"block {b.label}: variable index out of range")

    def block(self, label):
        for b in self.blocks:
            if b.label == label:
                return b
        raise KeyError(label)


@dataclass
class SolveReport:
    objective: float
    phase1_slack: float
    gap_bound: float
    newton_iterations: int
    outer_rounds: int
    block_margins: dict
    runtime_s: float
    message: str = ""


def _chol_or_none(S):
    try:
        return numerics.cholesky(S)
    except numerics.NotPositiveDefiniteError:
        return None


def _lower_inverse(L):
    """Inverse of a lower-triangular matrix by forward substitution."""
    d = L.shape[0]
    X = np.zeros((d, d))
    for i in range(d):
        X[i, i] = 1.0 / L[i, i]
        if i:
            X[i, :i] = -(L[i, :i] @ X[:i, :i]) / L[i, i]
    return X


def _chol_solve(L, rhs):
    """Solve (L L.T) x = rhs given the Cholesky factor L."""
    d = L.shape[0]
    y = np.empty(d)
    for i in range(d):
        y[i] = (rhs[i] - L[i, :i] @ y[:i]) / L[i, i]
    x = np.empty(d)
    for i in range(d - 1, -1, -1):
        x[i] = (y[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


class _Barrier:
    """Barrier value/gradient/Hessian for one set of shifted blocks."""

    def __init__(self, blocks, n_vars):
        self.blocks = blocks
        self.n_vars = n_vars
        self.total_dim = sum(b.dim for b in blocks)

    def chols(self, x):
        """Cholesky factors of the slacks -F_j(x), or None if not interior."""
        out = []
        for b in self.blocks:
            L = _chol_or_none(-b.evaluate(x))
            if L is None:
                return None
            out.append(L)
        return out

    def value(self, chols):
        return -2.0 * sum(float(np.log(np.diag(L)).sum()) for L in chols)

    def grad_hess(self, x, chols):
        g = np.zeros(self.n_vars)
        H = np.zeros((self.n_vars, self.n_vars))
        for b, L in zip(self.blocks, chols):
            if not len(b.var_idx):
                continue
            Linv = _lower_inverse(L)
            B = np.einsum("ab,kbc,dc->kad", Linv, b.basis, Linv, optimize=True)
            B = 0.5 * (B + np.transpose(B, (0, 2, 1)))
            g_loc = np.einsum("kii->k", B)
            H_loc = np.einsum("iab,jab->ij", B, B)
            g[b.var_idx] += g_loc
            H[np.ix_(b.var_idx, b.var_idx)] += H_loc
        return g, H


def _descent_direction(H, g):
    """Newton direction from a ridge-regularized Cholesky of H."""
    n = len(g)
    ridge = 0.0
    scale = max(float(np.abs(np.diag(H)).max()), 1.0)
    for _ in range(30):
        try:
            L = numerics.cholesky(H + ridge * np.eye(n) if ridge else H.copy())
        except numerics.NotPositiveDefiniteError:
            ridge = max(ridge * 10.0, 1e-14 * scale)
            continue
        dx = _chol_solve(L, -g)
        dec2 = float(-g @ dx)
        if dec2 >= 0.0 and np.all(np.isfinite(dx)):
            return dx, dec2
        ridge = max(ridge * 10.0, 1e-14 * scale)
    raise NumericalFailureError("Hessian could not be regularized")


def _newton_minimize(barrier, c_t, x, max_iter, newton_tol, stop_early=None):
    """Damped Newton on c_t.T x + barrier(x) from a strictly feasible x."""
    iterations = 0
    chols = barrier.chols(x)
    if chols is None:
        raise NumericalFailureError("lost strict feasibility at Newton entry")
    for _ in range(max_iter):
        g_bar, H = barrier.grad_hess(x, chols)
        g = c_t + g_bar
        dx, dec2 = _descent_direction(H, g)
        if dec2 <= 2.0 * newton_tol:
            break
        value0 = float(c_t @ x) + barrier.value(chols)
        slope = float(g @ dx)
        alpha = 1.0
        accepted = False
        while alpha >= 1e-16:
            x_try = x + alpha * dx
            chols_try = barrier.chols(x_try)
            if chols_try is not None:
                value_try = float(c_t @ x_try) + barrier.value(chols_try)
                if value_try <= value0 + 0.01 * alpha * slope:
                    x = x_try
                    chols = chols_try
                    accepted = True
                    break
            alpha *= 0.5
        iterations += 1
        if not accepted:
            # progress is below floating-point resolution of the merit value
            break
        if stop_early is not None and stop_early(x):
            break
    return x, iterations


def _shifted(blocks, eps_feas):
    out = []
    for b in blocks:
        out.append(
            LmiBlock(
                label=b.label,
                dim=b.dim,
                F0=b.F0 + eps_feas * np.eye(b.dim),
                var_idx=b.var_idx,
                basis=b.basis,
            )
        )
    return out


def _phase1(
    problem, shifted_blocks, eps_feas, t_growth, gap_target, newton_tol, max_newton, var_bound
):
    """Find x with F_j(x) + eps_feas I < 0 by minimizing the max-slack."""
    n = problem.n_vars
    aug = []
    for b in shifted_blocks:
        aug.append(
            LmiBlock(
                label=b.label,
                dim=b.dim,
                F0=b.F0,
                var_idx=np.concatenate([b.var_idx, [n]]),
                basis=np.concatenate([b.basis, [-np.eye(b.dim)]]),
            )
        )
    # keep the slack bounded below so the centering subproblems stay bounded
    aug.append(
        LmiBlock(
            label="_phase1_floor",
            dim=1,
            F0=np.array([[-1.0]]),
            var_idx=np.array([n]),
            basis=np.array([[[-1.0]]]),
        )
    )
    # box every variable: directions the objective does not control would
    # otherwise ride the barrier to arbitrarily large slack values
    eye_basis = np.zeros((n + 1, n + 1, n + 1))
    for i in range(n + 1):
        eye_basis[i, i, i] = 1.0
    for sign, name in ((1.0, "_phase1_box+"), (-1.0, "_phase1_box-")):
        aug.append(
            LmiBlock(
                label=name,
                dim=n + 1,
                F0=-var_bound * np.eye(n + 1),
                var_idx=np.arange(n + 1),
                basis=sign * eye_basis,
            )
        )
    barrier = _Barrier(aug, n + 1)
    x = np.zeros(n + 1)
    s0 = max(
        float(numerics.sym_eigen(0.5 * (b.evaluate(x[:n]) + b.evaluate(x[:n]).T)).values[-1])
        for b in shifted_blocks
    )
    x[n] = s0 + 1.0
    c_aug = np.zeros(n + 1)
    c_aug[n] = 1.0

    target = -eps_feas
    done = lambda z: z[n] <= target
    t = 1.0
    total_newton = 0
    while True:
        x, iters = _newton_minimize(
            barrier, t * c_aug, x, max_newton, newton_tol, stop_early=done
        )
        total_newton += iters
        if done(x):
            return x[:n], float(x[n]), total_newton
        if barrier.total_dim / t < gap_target:
            return x[:n], float(x[n]), total_newton
        t *= t_growth


def solve_sdp(
    problem: LmiProblem,
    eps_feas=1e-6,
    gap_target=1e-8,
    t_growth=10.0,
    t_init=1.0,
    newton_tol=1e-11,
    max_newton=120,
    var_bound=1e7,
):
    """Solve the LMI program; returns (x, objective, SolveReport).

    Raises InfeasibleError when phase 1 cannot drive the slack negative and
    NumericalFailureError when Newton stalls.
    """
    start = time.perf_counter()
    shifted_blocks = _shifted(problem.blocks, eps_feas)

    x_feas, slack, newton1 = _phase1(
        problem,
        shifted_blocks,
        eps_feas,
        t_growth,
        gap_target,
        newton_tol,
        max_newton,
        var_bound,
    )
    if slack >= 0.0:
        raise InfeasibleError(f"phase-1 slack converged to {slack:.3e} >= 0")

    barrier = _Barrier(shifted_blocks, problem.n_vars)
    if barrier.chols(x_feas) is None:
        raise NumericalFailureError("phase-1 point is not strictly feasible")

    x = x_feas
    t = t_init
    total_newton = newton1
    rounds = 0
    while True:
        x, iters = _newton_minimize(barrier, t * problem.c, x, max_newton, newton_tol)
        total_newton += iters
        rounds += 1
        if barrier.total_dim / t < gap_target:
            break
        t *= t_growth

    objective = float(problem.c @ x)
    margins = {}
    for b in problem.blocks:
        F = b.evaluate(x)
        margins[b.label] = float(numerics.sym_eigen(0.5 * (F + F.T)).values[-1])
    report = SolveReport(
        objective=objective,
        phase1_slack=slack,
        gap_bound=barrier.total_dim / t,
        newton_iterations=total_newton,
        outer_rounds=rounds,
        block_margins=margins,
        runtime_s=time.perf_counter() - start,
    )
    return x, objective, report

"""Observer gain synthesis via linear matrix inequalities.

Two programs are built and solved offline:

* rotational: a constant gain for the linear heading/yaw-rate/disturbance
  chain, minimizing the disturbance-to-error gain bound beta subject to a
  Lyapunov stability LMI, a Schur-complement norm bound, and a half-plane
  pole-placement LMI Re(poles) <= -delta_psi1;

* positional: a heading-scheduled gain for the planar chain.  A rotating
  coordinate change T_p(psi) makes the transformed error dynamics linear
  with the yaw rate r entering affinely, so stability and pole LMIs are
  imposed at the two yaw-rate vertices r_min and r_max and hold in between
  by convexity.  The Schur block trades disturbance rejection (k_omega_p)
  against measurement-noise sensitivity (k_n_p).

Numerical encoding: for pole offsets delta >> 1 the optimal (P, W) span
many orders of magnitude (the integrator-chain states scale like
delta^0, delta^1, delta^2), which makes raw certificates unverifiable in
float64.  The builders therefore work in similarity-scaled decision
variables P = D Phat D, W = de^3 D What with D = diag-powers of
de = max(1, delta), and congruence-scale each block so its entries are O(1)
near the optimum.  These are exact reformulations: a scaled block is
negative semidefinite iff the raw one is, and the extractors map solutions
back to raw matrices.  Two spectral cap blocks (on Phat and What) bound an
objective-neutral unbounded direction of the feasible set so the infimum is
attained; they bind at scales far above the certified margins.

Verification is independent of the solver: block eigenvalues come from the
Jacobi kernel and closed-loop poles from characteristic-polynomial root
finding on the O(1) scaled matrices, then exact rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .sdp import LmiBlock, LmiProblem, solve_sdp
from .vessel import VesselParams, inertia_matrix, rotation2


class InvalidConfigError(ValueError):
    """Synthesis configuration violates an invariant."""


# rotational chain: state (psi, r, sigma_r)
A_PSI = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
B_OMEGA_PSI = np.array([0.0, 0.0, 1.0])
C_PSI = np.array([[1.0, 0.0, 0.0]])

# positional chain: state (x, y, u, v, sigma_u, sigma_v)
A0_P = np.zeros((6, 6))
A0_P[0:2, 2:4] = np.eye(2)
A0_P[2:4, 4:6] = np.eye(2)
B_OMEGA_P = np.vstack([np.zeros((4, 2)), np.eye(2)])
C_P = np.hstack([np.eye(2), np.zeros((2, 4))])
S_P = np.array([[0.0, -1.0], [1.0, 0.0]])
S_TP = np.zeros((6, 6))
S_TP[0:2, 0:2] = S_P.T


def positional_system_matrix(psi):
    """A_p(psi): the planar chain with the velocity block rotated to earth frame."""
    A = np.zeros((6, 6))
    A[0:2, 2:4] = rotation2(psi)
    A[2:4, 4:6] = np.eye(2)
    return A


def transformation(psi):
    """Block-diagonal coordinate change T_p(psi) and its inverse.

    T_p = blkdiag(R2(psi).T, I, I) maps the positional error into the frame
    where the error dynamics become linear; orthogonal, so norms are kept.
    """
    R2 = rotation2(psi)
    T = np.eye(6)
    T[0:2, 0:2] = R2.T
    T_inv = np.eye(6)
    T_inv[0:2, 0:2] = R2
    return T, T_inv


class SynthesisConfig:
    """Tuning scalars of the two synthesis programs plus the inertia matrix.

    delta_psi1 / delta_p1 set the minimum convergence speed (pole offsets),
    k_omega_p / k_n_p weight disturbance rejection against noise rejection,
    and (r_min, r_max) bound the yaw rate for the vertex LMIs.  The
    remaining knobs are solver-health parameters: the strict-feasibility
    margin, the positive-definiteness floor, and the spectral caps that keep
    the feasible set bounded (in scaled coordinates).
    """

    def __init__(
        self,
        delta_psi1=0.05,
        delta_p1=0.05,
        k_omega_p=1.0,
        k_n_p=1.0,
        r_min=-0.8727,
        r_max=0.8727,
        M=None,
        eps_feas=1e-6,
        pd_floor=0.1,
        p_cap=1e4,
        w_cap=3000.0,
        delta_ref=0.5,
    ):
        self.delta_psi1 = float(delta_psi1)
        self.delta_p1 = float(delta_p1)
        self.k_omega_p = float(k_omega_p)
        self.k_n_p = float(k_n_p)
        self.r_min = float(r_min)
        self.r_max = float(r_max)
        self.M = inertia_matrix(VesselParams()) if M is None else np.asarray(M, dtype=float)
        self.eps_feas = float(eps_feas)
        self.pd_floor = float(pd_floor)
        self.p_cap = float(p_cap)
        self.w_cap = float(w_cap)
        self.delta_ref = float(delta_ref)
        self._validate()

    def _validate(self):
        if self.delta_psi1 < 0.0 or self.delta_p1 < 0.0:
            raise InvalidConfigError("pole offsets must be >= 0")
        if self.k_omega_p < 0.0 or self.k_n_p < 0.0:
            raise InvalidConfigError("weighting parameters must be >= 0")
        if not (self.r_min <= 0.0 <= self.r_max):
            raise InvalidConfigError("need r_min <= 0 <= r_max")
        if self.M.shape != (3, 3) or not np.array_equal(self.M, self.M.T):
            raise InvalidConfigError("M must be a symmetric 3x3 matrix")
        if not numerics.is_positive_definite(self.M):
            raise InvalidConfigError("M must be positive definite")
        if min(self.eps_feas, self.pd_floor) <= 0.0 or min(self.p_cap, self.w_cap) <= 0.0:
            raise InvalidConfigError("solver margins and caps must be positive")
        if self.delta_ref <= 0.0:
            raise InvalidConfigError("delta_ref must be positive")

    def cache_key(self):
        return (
            self.delta_psi1,
            self.delta_p1,
            self.k_omega_p,
            self.k_n_p,
            self.r_min,
            self.r_max,
            self.eps_feas,
            self.pd_floor,
            self.p_cap,
            self.w_cap,
            self.delta_ref,
            self.M.tobytes(),
        )


def _vech_indices(n):
    return [(i, j) for j in range(n) for i in range(j, n)]


def _sym_entry_basis(n, i, j):
    E = np.zeros((n, n))
    E[i, j] = 1.0
    E[j, i] = 1.0
    return E


def _sym(X):
    return X + X.T


def build_rotational_problem(config: SynthesisConfig) -> LmiProblem:
    """LMI program for the constant rotational gain.

    Decision vector (10 vars, scaled coordinates): vech(Phat) (6), What (3),
    betahat (1); objective selects betahat.
    """
    delta = config.delta_psi1
    de = max(config.delta_ref, delta)
    d = np.array([de**2, de, 1.0])
    n_p, n_vars = 3, 10
    pairs = _vech_indices(n_p)
    w_idx = list(range(6, 9))
    b_idx = 9

    p_bases = [_sym_entry_basis(n_p, i, j) for i, j in pairs]
    w_stab = [_sym(np.outer(np.eye(n_p)[k], C_PSI[0])) for k in range(n_p)]

    blocks = []

    # strict positive definiteness of P (in scaled coordinates)
    blocks.append(
        LmiBlock(
            label="positive_definite",
            dim=n_p,
            F0=config.pd_floor * np.eye(n_p),
            var_idx=np.arange(6),
            basis=np.array([-E for E in p_bases]),
        )
    )

    # Lyapunov decrease: A'P + PA + C'W' + WC + I <= 0 (scaled congruence)
    stab_F0 = np.diag(d**-2) / de
    stab_basis = [ _sym(A_PSI.T @ E) for E in p_bases ] + w_stab
    blocks.append(
        LmiBlock(
            label="stability",
            dim=n_p,
            F0=stab_F0,
            var_idx=np.arange(9),
            basis=np.array(stab_basis),
        )
    )

    # Schur bound ||P B_omega|| <= beta, 4x4
    schur_basis = []
    schur_idx = []
    for k, E in enumerate(p_bases):
        col = (d / de) * E[:, 2]
        if not col.any():
            continue
        Mb = np.zeros((4, 4))
        Mb[0:3, 3] = col
        Mb[3, 0:3] = col
        schur_basis.append(Mb)
        schur_idx.append(k)
    schur_basis.append(-np.eye(4))
    schur_idx.append(b_idx)
    blocks.append(
        LmiBlock(
            label="gain_bound",
            dim=4,
            F0=np.zeros((4, 4)),
            var_idx=np.array(schur_idx),
            basis=np.array(schur_basis),
        )
    )

    # pole placement: stability variant with 2*delta*P in place of +I
    pole_basis = [
        _sym(A_PSI.T @ E) + 2.0 * (delta / de) * E for E in p_bases
    ] + w_stab
    blocks.append(
        LmiBlock(
            label="poles",
            dim=n_p,
            F0=np.zeros((n_p, n_p)),
            var_idx=np.arange(9),
            basis=np.array(pole_basis),
        )
    )

    # spectral caps keeping the beta-neutral scale direction bounded
    blocks.append(
        LmiBlock(
            label="cap_p",
            dim=n_p,
            F0=-config.p_cap * np.eye(n_p),
            var_idx=np.arange(6),
            basis=np.array(p_bases),
        )
    )
    capw_basis = []
    for k in range(n_p):
        Mb = np.zeros((4, 4))
        Mb[k, 3] = 1.0
        Mb[3, k] = 1.0
        capw_basis.append(Mb)
    blocks.append(
        LmiBlock(
            label="cap_w",
            dim=4,
            F0=-config.w_cap * np.eye(4),
            var_idx=np.array(w_idx),
            basis=np.array(capw_basis),
        )
    )

    c = np.zeros(n_vars)
    c[b_idx] = 1.0
    meta = {
        "kind": "rotational",
        "de": de,
        "d_scale": d,
        "delta": delta,
        "eps_feas": config.eps_feas,
        "beta_scale": de,
        "pairs": pairs,
        "config": config,
    }
    return LmiProblem(n_vars=n_vars, c=c, blocks=blocks, meta=meta)


def build_positional_problem(config: SynthesisConfig) -> LmiProblem:
    """LMI program for the heading-scheduled positional gain.

    Decision vector (34 vars, scaled coordinates): vech(Phat) (21),
    What (12, row-major 6x2), betahat (1).  Stability and pole LMIs are
    imposed at both yaw-rate vertices.
    """
    delta = config.delta_p1
    de = max(config.delta_ref, delta)
    d = np.array([de**2, de**2, de, de, 1.0, 1.0])
    n_p = 6
    pairs = _vech_indices(n_p)
    n_pv = len(pairs)  # 21
    w_shape = (6, 2)
    n_w = w_shape[0] * w_shape[1]
    n_vars = n_pv + n_w + 1
    b_idx = n_vars - 1
    kappa = max(1.0, config.k_omega_p, config.k_n_p)

    p_bases = [_sym_entry_basis(n_p, i, j) for i, j in pairs]

    def w_pair(flat):
        return flat // 2, flat % 2

    w_stab = []
    for flat in range(n_w):
        i, k = w_pair(flat)
        G = np.zeros((n_p, n_p))
        G[i, :] = C_P[k, :]
        w_stab.append(_sym(G))

    def vertex_basis(r, pole_shift):
        out = []
        for E in p_bases:
            B = _sym(A0_P.T @ E) + (r / de) * (S_TP.T @ E + E @ S_TP)
            if pole_shift:
                B = B + 2.0 * (delta / de) * E
            out.append(B)
        return out + w_stab

    blocks = []
    blocks.append(
        LmiBlock(
            label="positive_definite",
            dim=n_p,
            F0=config.pd_floor * np.eye(n_p),
            var_idx=np.arange(n_pv),
            basis=np.array([-E for E in p_bases]),
        )
    )

    stab_F0 = np.diag(d**-2) / de
    pw_idx = np.arange(n_pv + n_w)
    for name, r in (("stability@rmin", config.r_min), ("stability@rmax", config.r_max)):
        blocks.append(
            LmiBlock(
                label=name,
                dim=n_p,
                F0=stab_F0,
                var_idx=pw_idx,
                basis=np.array(vertex_basis(r, pole_shift=False)),
            )
        )

    # 10x10 Schur bound || [k_w P B_omega, k_n W] || <= beta
    schur_basis = []
    schur_idx = []
    coef_p = config.k_omega_p / (kappa * de)
    coef_w = config.k_n_p * de**2 / kappa
    if coef_p != 0.0:
        for k, E in enumerate(p_bases):
            cols = (d[:, None] * E[:, 4:6]) * coef_p
            if not cols.any():
                continue
            Mb = np.zeros((10, 10))
            Mb[0:6, 6:8] = cols
            Mb[6:8, 0:6] = cols.T
            schur_basis.append(Mb)
            schur_idx.append(k)
    if coef_w != 0.0:
        for flat in range(n_w):
            i, k = w_pair(flat)
            Mb = np.zeros((10, 10))
            Mb[i, 8 + k] = coef_w * d[i]
            Mb[8 + k, i] = coef_w * d[i]
            schur_basis.append(Mb)
            schur_idx.append(n_pv + flat)
    schur_basis.append(-np.eye(10))
    schur_idx.append(b_idx)
    blocks.append(
        LmiBlock(
            label="gain_bound",
            dim=10,
            F0=np.zeros((10, 10)),
            var_idx=np.array(schur_idx),
            basis=np.array(schur_basis),
        )
    )

    for name, r in (("poles@rmin", config.r_min), ("poles@rmax", config.r_max)):
        blocks.append(
            LmiBlock(
                label=name,
                dim=n_p,
                F0=np.zeros((n_p, n_p)),
                var_idx=pw_idx,
                basis=np.array(vertex_basis(r, pole_shift=True)),
            )
        )

    blocks.append(
        LmiBlock(
            label="cap_p",
            dim=n_p,
            F0=-config.p_cap * np.eye(n_p),
            var_idx=np.arange(n_pv),
            basis=np.array(p_bases),
        )
    )
    capw_basis = []
    for flat in range(n_w):
        i, k = w_pair(flat)
        Mb = np.zeros((8, 8))
        Mb[i, 6 + k] = 1.0
        Mb[6 + k, i] = 1.0
        capw_basis.append(Mb)
    blocks.append(
        LmiBlock(
            label="cap_w",
            dim=8,
            F0=-config.w_cap * np.eye(8),
            var_idx=np.arange(n_pv, n_pv + n_w),
            basis=np.array(capw_basis),
        )
    )

    c = np.zeros(n_vars)
    c[b_idx] = 1.0
    meta = {
        "kind": "positional",
        "de": de,
        "d_scale": d,
        "delta": delta,
        "eps_feas": config.eps_feas,
        "beta_scale": kappa * de,
        "kappa": kappa,
        "pairs": pairs,
        "config": config,
    }
    return LmiProblem(n_vars=n_vars, c=c, blocks=blocks, meta=meta)


def _unpack_sym(values, pairs, n):
    P = np.zeros((n, n))
    for v, (i, j) in zip(values, pairs):
        P[i, j] = v
        P[j, i] = v
    return P


@dataclass(frozen=True)
class RotationalSolution:
    """Certified solution of the rotational program (raw coordinates)."""

    P_psi: np.ndarray
    W_psi: np.ndarray
    beta_psi: float
    L_psi: np.ndarray


@dataclass(frozen=True)
class PositionalSolution:
    """Certified solution of the positional program (raw coordinates).

    ``L_pz`` is the constant transformed-frame gain P_p^-1 W_p; the
    heading-dependent gain is recovered online by ``positional_gain``.
    """

    P_p: np.ndarray
    W_p: np.ndarray
    beta_p: float
    L_pz: np.ndarray


def extract_rotational_gain(P_psi, W_psi):
    """L_psi = -P_psi^-1 W_psi via an LU solve (no explicit inverse)."""
    return -numerics.solve_linear(np.asarray(P_psi, dtype=float), np.asarray(W_psi, dtype=float))


def rotational_solution_from_x(problem: LmiProblem, x) -> RotationalSolution:
    meta = problem.meta
    de, d = meta["de"], meta["d_scale"]
    P_hat = _unpack_sym(x[0:6], meta["pairs"], 3)
    W_hat = np.asarray(x[6:9], dtype=float)
    P = (np.outer(d, d)) * P_hat
    W = de**3 * d * W_hat
    # gain computed in scaled coordinates where P_hat is well conditioned
    L = -(de**3) * (numerics.solve_linear(P_hat, W_hat) / d)
    return RotationalSolution(P_psi=P, W_psi=W, beta_psi=float(meta["beta_scale"] * x[9]), L_psi=L)


def positional_solution_from_x(problem: LmiProblem, x) -> PositionalSolution:
    meta = problem.meta
    de, d = meta["de"], meta["d_scale"]
    n_pv = len(meta["pairs"])
    P_hat = _unpack_sym(x[0:n_pv], meta["pairs"], 6)
    W_hat = np.asarray(x[n_pv:n_pv + 12], dtype=float).reshape(6, 2)
    P = np.outer(d, d) * P_hat
    W = de**3 * d[:, None] * W_hat
    L_pz = de**3 * (numerics.solve_linear(P_hat, W_hat) / d[:, None])
    return PositionalSolution(
        P_p=P, W_p=W, beta_p=float(meta["beta_scale"] * x[-1]), L_pz=L_pz
    )


def x_from_rotational(problem: LmiProblem, sol: RotationalSolution):
    meta = problem.meta
    de, d = meta["de"], meta["d_scale"]
    P_hat = sol.P_psi / np.outer(d, d)
    W_hat = sol.W_psi / (de**3 * d)
    x = np.empty(10)
    x[0:6] = [P_hat[i, j] for i, j in meta["pairs"]]
    x[6:9] = W_hat
    x[9] = sol.beta_psi / meta["beta_scale"]
    return x

def x_from_positional(problem: LmiProblem, sol: PositionalSolution):
    meta = problem.meta
    de, d = meta["de"], meta["d_scale"]
    P_hat = sol.P_p / np.outer(d, d)
    W_hat = sol.W_p / (de**3 * d[:, None])
    n_pv = len(meta["pairs"])
    x = np.empty(n_pv + 13)
    x[0:n_pv] = [P_hat[i, j] for i, j in meta["pairs"]]
    x[n_pv:n_pv + 12] = W_hat.reshape(-1)
    x[-1] = sol.beta_p / meta["beta_scale"]
    return x


def positional_gain(sol: PositionalSolution, psi):
    """Heading-scheduled gain L_p(psi) = -T_p^-1 L_pz R2(psi).T.

    Evaluated fresh at every observer step from the constant L_pz; its norm
    is independent of psi because the factors are orthogonal.
    """
    R2 = rotation2(psi)
    G = sol.L_pz @ R2.T
    L = np.empty((6, 2))
    L[0:2] = -(R2 @ G[0:2])
    L[2:6] = -G[2:6]
    return L


def char_poly(A):
    """Monic characteristic polynomial coefficients by Faddeev-LeVerrier.

    Returns [1, c_{n-1}, ..., c_0] in descending powers.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    coeffs = [1.0]
    Mk = np.zeros_like(A)
    ck = 1.0
    for k in range(1, n + 1):
        Mk = A @ Mk + ck * np.eye(n)
        ck = -np.trace(A @ Mk) / k
        coeffs.append(float(ck))
    return np.array(coeffs)


def poly_roots(coeffs, max_iter=300):
    """All roots of a monic polynomial by Durand-Kerner iteration."""
    coeffs = np.asarray(coeffs, dtype=float)
    n = len(coeffs) - 1
    if n == 0:
        return np.array([], dtype=complex)
    if n == 1:
        return np.array([-coeffs[1]], dtype=complex)
    radius = 1.0 + float(np.abs(coeffs[1:]).max())
    k = np.arange(n)
    z = radius * np.exp(2j * math.pi * (k + 0.25) / n)
    tol = 1e-14 * max(1.0, radius)
    for _ in range(max_iter):
        p = np.polyval(coeffs, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = diff.prod(axis=1)
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        dz = p / denom
        z = z - dz
        if np.abs(dz).max() <= tol:
            break
    return z


def matrix_eigenvalues(A):
    """Eigenvalues of a small (n <= ~8) real matrix via its companion polynomial."""
    return poly_roots(char_poly(A))


def _closed_loop_scaled(problem, x):
    """Scaled closed-loop matrices whose eigenvalues, times de, are the raw poles."""
    meta = problem.meta
    de = meta["de"]
    if meta["kind"] == "rotational":
        P_hat = _unpack_sym(x[0:6], meta["pairs"], 3)
        W_hat = np.asarray(x[6:9], dtype=float)
        L_hat = numerics.solve_linear(P_hat, W_hat)
        return {None: A_PSI + np.outer(L_hat, C_PSI[0])}
    config = meta["config"]
    n_pv = len(meta["pairs"])
    P_hat = _unpack_sym(x[0:n_pv], meta["pairs"], 6)
    W_hat = np.asarray(x[n_pv:n_pv + 12], dtype=float).reshape(6, 2)
    L_hat = numerics.solve_linear(P_hat, W_hat)
    out = {}
    for r in (config.r_min, 0.0, config.r_max):
        out[r] = A0_P + (r / de) * S_TP + L_hat @ C_P
    return out


@dataclass(frozen=True)
class BlockCheck:
    label: str
    dim: int
    max_eig: float
    limit: float

    @property
    def ok(self):
        return self.max_eig <= self.limit


@dataclass(frozen=True)
class PoleCheck:
    r: object
    real_parts: tuple
    limit: float

    @property
    def ok(self):
        return max(self.real_parts) <= self.limit


@dataclass(frozen=True)
class VerificationReport:
    kind: str
    block_checks: tuple
    pd_ok: bool
    lambda_min_scaled: float
    pole_checks: tuple

    @property
    def passed(self):
        return (
            self.pd_ok
            and all(b.ok for b in self.block_checks)
            and all(p.ok for p in self.pole_checks)
        )

    def summary(self):
        lines = [f"{self.kind} verification: {'PASS' if self.passed else 'FAIL'}"]
        lines.append(
            f"  P positive definite: {'yes' if self.pd_ok else 'NO'}"
            f" (lambda_min scaled = {self.lambda_min_scaled:.3e})"
        )
        for b in self.block_checks:
            lines.append(
                f"  block {b.label:<18} dim {b.dim:>2}  max eig {b.max_eig: .3e}"
                f"  limit {b.limit: .3e}  {'ok' if b.ok else 'VIOLATED'}"
            )
        for p in self.pole_checks:
            tag = "" if p.r is None else f" @ r={p.r:+.4f}"
            lines.append(
                f"  poles{tag}: max Re = {max(p.real_parts): .6e}"
                f"  limit {p.limit: .6e}  {'ok' if p.ok else 'VIOLATED'}"
            )
        return "\n".join(lines)


def verify_solution(problem: LmiProblem, x, tol=1e-7, pole_tol=1e-6) -> VerificationReport:
    """Independent certificate check of a candidate solution.

    Re-evaluates every LMI block at x and bounds its largest eigenvalue by
    -eps_feas + tol; checks positive definiteness of P; and places the
    closed-loop poles (at the yaw-rate vertices and r = 0 for the positional
    problem) left of -delta + pole_tol.  Never inspects solver internals, so
    any x passing here certifies the Lyapunov decrease conditions no matter
    where it came from.
    """
    x = np.asarray(x, dtype=float)
    meta = problem.meta
    eps_feas = meta.get("eps_feas", 1e-6)
    limit = -eps_feas + tol
    checks = []
    for b in problem.blocks:
        F = b.evaluate(x)
        lam = float(numerics.sym_eigen(0.5 * (F + F.T)).values[-1])
        checks.append(BlockCheck(label=b.label, dim=b.dim, max_eig=lam, limit=limit))

    n_pv = len(meta["pairs"])
    n_dim = 3 if meta["kind"] == "rotational" else 6
    P_hat = _unpack_sym(x[0:n_pv], meta["pairs"], n_dim)
    lam_min = float(numerics.sym_eigen(P_hat).values[0])
    pd_ok = lam_min > 0.0 and numerics.is_positive_definite(
        np.outer(meta["d_scale"], meta["d_scale"]) * P_hat
    )

    de = meta["de"]
    delta = meta["delta"]
    pole_checks = []
    for r, Phi in _closed_loop_scaled(problem, x).items():
        reals = tuple(sorted(de * matrix_eigenvalues(Phi).real))
        pole_checks.append(PoleCheck(r=r, real_parts=reals, limit=-delta + pole_tol))

    return VerificationReport(
        kind=meta["kind"],
        block_checks=tuple(checks),
        pd_ok=pd_ok,
        lambda_min_scaled=lam_min,
        pole_checks=tuple(pole_checks),
    )


@dataclass(frozen=True)
class ObserverGains:
    """Everything the online observers need: tuning, inertia, solved gains."""

    config: SynthesisConfig
    rotational: RotationalSolution
    positional: PositionalSolution
    M_inv: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.M_inv is None:
            object.__setattr__(
                self, "M_inv", numerics.solve_linear(self.config.M, np.eye(3))
            )


@dataclass(frozen=True)
class SynthesisResult:
    gains: ObserverGains
    rotational_report: VerificationReport
    positional_report: VerificationReport
    rotational_solve: object
    positional_solve: object


def synthesize(config: SynthesisConfig, verify_tol=1e-7, pole_tol=1e-6) -> SynthesisResult:
    """Solve both programs offline and bundle gains with their certificates.

    Raises InvalidConfigError, sdp.InfeasibleError or sdp.NumericalFailureError.
    """
    if config.k_omega_p == 0.0 and config.k_n_p == 0.0:
        raise InvalidConfigError("k_omega_p and k_n_p cannot both be zero")

    rot_problem = build_rotational_problem(config)
    x_rot, _, rot_report = solve_sdp(rot_problem, eps_feas=config.eps_feas)
    rot_sol = rotational_solution_from_x(rot_problem, x_rot)
    rot_verify = verify_solution(rot_problem, x_rot, tol=verify_tol, pole_tol=pole_tol)

    pos_problem = build_positional_problem(config)
    x_pos, _, pos_report = solve_sdp(pos_problem, eps_feas=config.eps_feas)
    pos_sol = positional_solution_from_x(pos_problem, x_pos)
    pos_verify = verify_solution(pos_problem, x_pos, tol=verify_tol, pole_tol=pole_tol)

    gains = ObserverGains(config=config, rotational=rot_sol, positional=pos_sol)
    return SynthesisResult(
        gains=gains,
        rotational_report=rot_verify,
        positional_report=pos_verify,
        rotational_solve=rot_report,
        positional_solve=pos_report,
    )


def verify_gains(config: SynthesisConfig, gains: ObserverGains, tol=1e-7, pole_tol=1e-6):
    """Re-run the certificate checks on stored gain matrices."""
    rot_problem = build_rotational_problem(config)
    pos_problem = build_positional_problem(config)
    rot = verify_solution(
        rot_problem, x_from_rotational(rot_problem, gains.rotational), tol, pole_tol
    )
    pos = verify_solution(
        pos_problem, x_from_positional(pos_problem, gains.positional), tol, pole_tol
    )
    return rot, pos


def iss_bound_rotational(sol: RotationalSolution, theta, omega_star):
    """Asymptotic rotational error-norm bound for |omega_psi| <= omega_star."""
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie strictly between 0 and 1")
    if omega_star < 0.0:
        raise ValueError("signal bounds must be >= 0")
    ev = numerics.sym_eigen(sol.P_psi).values
    gain = math.sqrt(float(sol.P_psi[:, 2] @ sol.P_psi[:, 2]))
    return math.sqrt(ev[-1] / ev[0]) * 2.0 * gain * omega_star / theta


def iss_bound_positional(sol: PositionalSolution, k_omega, k_n, theta, omega_star, noise_star):
    """Asymptotic transformed positional error-norm bound.

    ``omega_star`` bounds ||omega_p|| and ``noise_star`` bounds ||n_p||; the
    orthogonal factor linking the two channels has norm <= 1 and is dropped.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie strictly between 0 and 1")
    if omega_star < 0.0 or noise_star < 0.0:
        raise ValueError("signal bounds must be >= 0")
    parts = []
    for bound, k, name in ((omega_star, k_omega, "omega"), (noise_star, k_n, "noise")):
        if k == 0.0:
            if bound > 0.0:
                raise ValueError(f"{name} bound is positive but its weight is zero")
            parts.append(0.0)
        else:
            parts.append(bound / k)
    gamma = math.hypot(parts[0], parts[1])
    upsilon = np.hstack([k_omega * sol.P_p[:, 4:6], k_n * sol.W_p])
    ev = numerics.sym_eigen(sol.P_p).values
    return math.sqrt(ev[-1] / ev[0]) * 2.0 * numerics.spectral_norm(upsilon) * gamma / theta

"""CyberShip II 3-DOF maneuvering model.

Ground-truth plant for the estimator benchmarks.  Kinematics are
eta_dot = R(psi) nu with eta = [x, y, psi] in the earth-fixed frame and
nu = [u, v, r] in the body frame; kinetics are

    M nu_dot + C(nu) nu + D(nu) nu = tau_w + tau

with the standard 3-DOF maneuvering forms for the Coriolis and damping
matrices.  The lumped disturbance

    sigma = M^-1 (-C(nu) nu - D(nu) nu + tau_w)

collapses everything the observers deliberately do not model, so the same
dynamics can equivalently be written nu_dot = M^-1 tau + sigma.  The
potential term g(eta, nu) is taken as zero: the identified model has no
closed form for it, and keeping it out of the simulator means sigma is
exactly computable as ground truth for the error statistics.

Heading is stored unwrapped so integration stays continuous; wrapping to
(-pi, pi] happens only at the CSV/presentation layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics


@dataclass(frozen=True)
class VesselParams:
    """Geometric and hydrodynamic coefficients of the test-bed craft.

    Defaults are the identified CyberShip II values (a 1:70 scale supply-ship
    replica).  Units: masses kg, inertia kg m^2, lengths m, damping terms in
    the usual SNAME convention.
    """

    m: float = 23.8
    I_z: float = 1.76
    x_g: float = 0.046
    X_udot: float = -2.0
    Y_vdot: float = -10.0
    Y_rdot: float = 0.0
    N_vdot: float = 0.0
    N_rdot: float = -1.0
    X_u: float = -0.72253
    X_uu: float = -1.32742
    Y_v: float = -0.88965
    Y_vv: float = -36.47287
    Y_vr: float = -0.805
    Y_r: float = -7.25
    Y_rv: float = -0.845
    Y_rr: float = -3.45
    N_v: float = 0.0313
    N_vv: float = 3.95645
    N_vr: float = 0.13
    N_r: float = -1.9
    N_rv: float = 0.08
    N_rr: float = -0.75

    def __post_init__(self):
        if self.Y_rdot != self.N_vdot:
            raise ValueError(
                "Y_rdot must equal N_vdot exactly for a symmetric inertia matrix"
            )
        # raises NotPositiveDefiniteError for unphysical coefficient sets
        numerics.cholesky(inertia_matrix(self))


@dataclass(frozen=True)
class Pose:
    """Earth-fixed position and heading [m, m, rad]; psi unwrapped."""

    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0

    def as_array(self):
        return np.array([self.x, self.y, self.psi])


@dataclass(frozen=True)
class BodyVelocity:
    """Body-frame surge, sway and yaw rate [m/s, m/s, rad/s]."""

    u: float = 0.0
    v: float = 0.0
    r: float = 0.0

    def as_array(self):
        return np.array([self.u, self.v, self.r])


@dataclass(frozen=True)
class ControlInput:
    """Surge force and yaw torque; the actuators cannot force sway."""

    F_u: float = 0.0
    tau_r: float = 0.0

    def as_array(self):
        return np.array([self.F_u, 0.0, self.tau_r])


@dataclass(frozen=True)
class EnvDisturbance:
    """Environmental force/torque from wind, waves and currents."""

    F_wu: float = 0.0
    F_wv: float = 0.0
    tau_wr: float = 0.0

    def as_array(self):
        return np.array([self.F_wu, self.F_wv, self.tau_wr])


@dataclass(frozen=True)
class LumpedDisturbance:
    """Lumped generalised disturbance acting on the accelerations."""

    sigma_u: float = 0.0
    sigma_v: float = 0.0
    sigma_r: float = 0.0

    def as_array(self):
        return np.array([self.sigma_u, self.sigma_v, self.sigma_r])


def rotation(psi):
    """Body-to-earth rotation R(psi), member of SO(3) for every psi."""
    c = math.cos(psi)
    s = math.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation2(psi):
    """Planar 2x2 block of R(psi)."""
    c = math.cos(psi)
    s = math.sin(psi)
    return np.array([[c, -s], [s, c]])


def inertia_matrix(params: VesselParams):
    """Rigid-body plus added-mass inertia; symmetric positive definite."""
    m, xg = params.m, params.x_g
    return np.array(
        [
            [m - params.X_udot, 0.0, 0.0],
            [0.0, m - params.Y_vdot, m * xg - params.Y_rdot],
            [0.0, m * xg - params.N_vdot, params.I_z - params.N_rdot],
        ]
    )


def coriolis(params: VesselParams, nu: BodyVelocity):
    """Coriolis/centripetal matrix in the skew maneuvering form.

    nu.T @ C(nu) @ nu == 0 identically, so C does no work.
    """
    c13 = -(params.m - params.Y_vdot) * nu.v - (params.m * params.x_g - params.Y_rdot) * nu.r
    c23 = (params.m - params.X_udot) * nu.u
    return np.array(
        [
            [0.0, 0.0, c13],
            [0.0, 0.0, c23],
            [-c13, -c23, 0.0],
        ]
    )


def damping(params: VesselParams, nu: BodyVelocity):
    """Linear-plus-quadratic hydrodynamic damping D(nu)."""
    au, av, ar = abs(nu.u), abs(nu.v), abs(nu.r)
    return -np.array(
        [
            [params.X_u + params.X_uu * au, 0.0, 0.0],
            [
                0.0,
                params.Y_v + params.Y_vv * av + params.Y_vr * ar,
                params.Y_r + params.Y_rv * av + params.Y_rr * ar,
            ],
            [
                0.0,
                params.N_v + params.N_vv * av + params.N_vr * ar,
                params.N_r + params.N_rv * av + params.N_rr * ar,
            ],
        ]
    )


def lumped_disturbance(params, eta: Pose, nu: BodyVelocity, tau_w: EnvDisturbance):
    """sigma = M^-1 (-C nu - D nu + tau_w), with g(eta, nu) == 0.

    ``eta`` is part of the contract because the unmodelled-effects term would
    depend on it; with g == 0 it does not enter the value.
    """
    del eta
    nu_vec = nu.as_array()
    rhs = -coriolis(params, nu) @ nu_vec - damping(params, nu) @ nu_vec + tau_w.as_array()
    sig = numerics.solve_linear(inertia_matrix(params), rhs)
    return LumpedDisturbance(sig[0], sig[1], sig[2])


def dynamics_derivative(params, state, tau: ControlInput, tau_w: EnvDisturbance):
    """Time derivative (eta_dot, nu_dot) of the full nonlinear model.

    Computed in the disturbance form nu_dot = M^-1 tau + sigma, which equals
    the force-balance form M nu_dot = -C nu - D nu + tau_w + tau by
    construction of sigma.
    """
    eta, nu = state
    eta_dot = rotation(eta.psi) @ nu.as_array()
    sigma = lumped_disturbance(params, eta, nu, tau_w)
    nu_dot = numerics.solve_linear(inertia_matrix(params), tau.as_array()) + sigma.as_array()
    return eta_dot, nu_dot


def step(params, state, tau: ControlInput, tau_w: EnvDisturbance, h):
    """Advance (Pose, BodyVelocity) one RK4 step with zero-order-held inputs."""
    eta, nu = state
    packed = np.concatenate([eta.as_array(), nu.as_array()])

    def f(_t, z):
        e = Pose(z[0], z[1], z[2])
        n = BodyVelocity(z[3], z[4], z[5])
        ed, nd = dynamics_derivative(params, (e, n), tau, tau_w)
        return np.concatenate([ed, nd])

    out = numerics.rk4_step(f, packed, 0.0, h)
    return Pose(out[0], out[1], out[2]), BodyVelocity(out[3], out[4], out[5])


def measure(eta: Pose, n_p):
    """GPS/gyrocompass measurement y = [x + n_x, y + n_y, psi].

    Position noise only; the heading channel is noiseless by assumption.
    """
    n_p = np.asarray(n_p, dtype=float)
    if not np.all(np.isfinite(n_p)):
        raise numerics.NonFiniteError("measurement noise is not finite")
    return np.array([eta.x + n_p[0], eta.y + n_p[1], eta.psi])

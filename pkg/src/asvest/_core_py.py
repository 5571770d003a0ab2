"""Pure-Python simulation kernel: plant + observers co-integration.

Fallback for the compiled extension `_core`; both implement the same loop
with the same operation ordering so their trajectories agree bit-for-bit.
Scalar arithmetic on floats beats numpy at these state sizes, which keeps
the fallback usable when no compiler is available.

Per step k: sample the held inputs, log the row, advance the plant one RK4
step, then advance both observers one RK4 step against the held
measurement.  Mode 0 integrates the full nonlinear vessel; mode 1 is the
surrogate plant with a prescribed disturbance (held over the step).
"""

from __future__ import annotations

import math

import numpy as np


class DivergedError(RuntimeError):
    """State left the finite range; carries the failing step index."""

    def __init__(self, step):
        super().__init__(f"simulation diverged at step {step}")
        self.step = step


MODE_FULL = 0
MODE_SURROGATE = 1


def simulate(mode, dt, n_steps, par, minv, L_psi, Lpz, tau, tauw, sigma_pre, noise,
             eta0, nu0, rot0, pos0):
    """Run the co-integration loop; returns a dict of (n_steps+1, .) arrays.

    par packs the plant constants
    (cu, cv, cr, X_u, X_uu, Y_v, Y_vv, Y_vr, Y_r, Y_rv, Y_rr,
     N_v, N_vv, N_vr, N_r, N_rv, N_rr)
    with cu = m - X_udot, cv = m - Y_vdot, cr = m*x_g - Y_rdot.
    """
    (cu, cv, cr, X_u, X_uu, Y_v, Y_vv, Y_vr, Y_r, Y_rv, Y_rr,
     N_v, N_vv, N_vr, N_r, N_rv, N_rr) = [float(v) for v in par]
    m00, m01, m02 = float(minv[0][0]), float(minv[0][1]), float(minv[0][2])
    m10, m11, m12 = float(minv[1][0]), float(minv[1][1]), float(minv[1][2])
    m20, m21, m22 = float(minv[2][0]), float(minv[2][1]), float(minv[2][2])
    l1, l2, l3 = float(L_psi[0]), float(L_psi[1]), float(L_psi[2])
    Lz = [[float(Lpz[i][j]) for j in range(2)] for i in range(6)]

    tau = np.ascontiguousarray(tau, dtype=float).tolist()
    tauw = np.ascontiguousarray(tauw, dtype=float).tolist()
    sigma_pre = np.ascontiguousarray(sigma_pre, dtype=float).tolist()
    noise = np.ascontiguousarray(noise, dtype=float).tolist()

    x, y, psi = (float(v) for v in eta0)
    u, v, r = (float(v) for v in nu0)
    ph, rh, sh = (float(v) for v in rot0)
    xh, yh, uh, vh, suh, svh = (float(v) for v in pos0)

    n_out = n_steps + 1
    out_eta = np.empty((n_out, 3))
    out_nu = np.empty((n_out, 3))
    out_sigma = np.empty((n_out, 3))
    out_meas = np.empty((n_out, 3))
    out_rot = np.empty((n_out, 3))
    out_pos = np.empty((n_out, 6))

    def plant_accel(uu, vv, rr, fu, tr, fwu, fwv, twr):
        # force balance: tau + tau_w - C(nu) nu - D(nu) nu, then M^-1
        c13 = -cv * vv - cr * rr
        c23 = cu * uu
        d11 = -(X_u + X_uu * abs(uu))
        d22 = -(Y_v + Y_vv * abs(vv) + Y_vr * abs(rr))
        d23 = -(Y_r + Y_rv * abs(vv) + Y_rr * abs(rr))
        d32 = -(N_v + N_vv * abs(vv) + N_vr * abs(rr))
        d33 = -(N_r + N_rv * abs(vv) + N_rr * abs(rr))
        f1 = fu + fwu - c13 * rr - d11 * uu
        f2 = fwv - c23 * rr - (d22 * vv + d23 * rr)
        f3 = tr + twr - (-c13 * uu - c23 * vv) - (d32 * vv + d33 * rr)
        return (
            m00 * f1 + m01 * f2 + m02 * f3,
            m10 * f1 + m11 * f2 + m12 * f3,
            m20 * f1 + m21 * f2 + m22 * f3,
        )

    def lumped(uu, vv, rr, fwu, fwv, twr):
        # sigma = M^-1 (-C nu - D nu + tau_w)
        c13 = -cv * vv - cr * rr
        c23 = cu * uu
        d11 = -(X_u + X_uu * abs(uu))
        d22 = -(Y_v + Y_vv * abs(vv) + Y_vr * abs(rr))
        d23 = -(Y_r + Y_rv * abs(vv) + Y_rr * abs(rr))
        d32 = -(N_v + N_vv * abs(vv) + N_vr * abs(rr))
        d33 = -(N_r + N_rv * abs(vv) + N_rr * abs(rr))
        g1 = fwu - c13 * rr - d11 * uu
        g2 = fwv - c23 * rr - (d22 * vv + d23 * rr)
        g3 = twr - (-c13 * uu - c23 * vv) - (d32 * vv + d33 * rr)
        return (
            m00 * g1 + m01 * g2 + m02 * g3,
            m10 * g1 + m11 * g2 + m12 * g3,
            m20 * g1 + m21 * g2 + m22 * g3,
        )

    for k in range(n_out):
        fu, tr = tau[k]
        fwu, fwv, twr = tauw[k]
        nx, ny = noise[k]

        if mode == MODE_FULL:
            sg = lumped(u, v, r, fwu, fwv, twr)
        else:
            sg = (sigma_pre[k][0], sigma_pre[k][1], sigma_pre[k][2])

        yx = x + nx
        yy = y + ny
        ypsi = psi

        out_eta[k, 0] = x
        out_eta[k, 1] = y
        out_eta[k, 2] = psi
        out_nu[k, 0] = u
        out_nu[k, 1] = v
        out_nu[k, 2] = r
        out_sigma[k, 0] = sg[0]
        out_sigma[k, 1] = sg[1]
        out_sigma[k, 2] = sg[2]
        out_meas[k, 0] = yx
        out_meas[k, 1] = yy
        out_meas[k, 2] = ypsi
        out_rot[k, 0] = ph
        out_rot[k, 1] = rh
        out_rot[k, 2] = sh
        out_pos[k, 0] = xh
        out_pos[k, 1] = yh
        out_pos[k, 2] = uh
        out_pos[k, 3] = vh
        out_pos[k, 4] = suh
        out_pos[k, 5] = svh
        if k == n_steps:
            break

        # ---- plant RK4 (inputs held) ----
        if mode == MODE_FULL:
            def deriv(px, py, ppsi, pu, pv, pr):
                c = math.cos(ppsi)
                s = math.sin(ppsi)
                au, av, ar = plant_accel(pu, pv, pr, fu, tr, fwu, fwv, twr)
                return (c * pu - s * pv, s * pu + c * pv, pr, au, av, ar)
        else:
            sgu, sgv, sgr = sg
            a_u = m00 * fu + m02 * tr
            a_v = m10 * fu + m12 * tr
            a_r = m20 * fu + m22 * tr

            def deriv(px, py, ppsi, pu, pv, pr):
                c = math.cos(ppsi)
                s = math.sin(ppsi)
                return (
                    c * pu - s * pv,
                    s * pu + c * pv,
                    pr,
                    a_u + sgu,
                    a_v + sgv,
                    a_r + sgr,
                )

        k1 = deriv(x, y, psi, u, v, r)
        hh = 0.5 * dt
        k2 = deriv(x + hh * k1[0], y + hh * k1[1], psi + hh * k1[2],
                   u + hh * k1[3], v + hh * k1[4], r + hh * k1[5])
        k3 = deriv(x + hh * k2[0], y + hh * k2[1], psi + hh * k2[2],
                   u + hh * k2[3], v + hh * k2[4], r + hh * k2[5])
        k4 = deriv(x + dt * k3[0], y + dt * k3[1], psi + dt * k3[2],
                   u + dt * k3[3], v + dt * k3[4], r + dt * k3[5])
        w = dt / 6.0
        x += w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y += w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        psi += w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        u += w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        v += w * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
        r += w * (k1[5] + 2.0 * k2[5] + 2.0 * k3[5] + k4[5])

        # ---- rotational observer RK4 (y_psi, tau held) ----
        a_r_obs = m20 * fu + m22 * tr

        def rot_deriv(p1, p2, p3):
            e = ypsi - p1
            return (p2 + l1 * e, p3 + a_r_obs + l2 * e, l3 * e)

        q1 = rot_deriv(ph, rh, sh)
        q2 = rot_deriv(ph + hh * q1[0], rh + hh * q1[1], sh + hh * q1[2])
        q3 = rot_deriv(ph + hh * q2[0], rh + hh * q2[1], sh + hh * q2[2])
        q4 = rot_deriv(ph + dt * q3[0], rh + dt * q3[1], sh + dt * q3[2])
        ph += w * (q1[0] + 2.0 * q2[0] + 2.0 * q3[0] + q4[0])
        rh += w * (q1[1] + 2.0 * q2[1] + 2.0 * q3[1] + q4[1])
        sh += w * (q1[2] + 2.0 * q2[2] + 2.0 * q3[2] + q4[2])

        # ---- positional observer RK4 (y_p, psi_meas, tau held) ----
        c = math.cos(ypsi)
        s = math.sin(ypsi)
        # L_p(psi) = -T_p^-1 Lpz R2(psi)^T, rows 0:2 rotated by R2
        g00 = Lz[0][0] * c - Lz[0][1] * s
        g01 = Lz[0][0] * s + Lz[0][1] * c
        g10 = Lz[1][0] * c - Lz[1][1] * s
        g11 = Lz[1][0] * s + Lz[1][1] * c
        K = [
            (-(c * g00 - s * g10), -(c * g01 - s * g11)),
            (-(s * g00 + c * g10), -(s * g01 + c * g11)),
        ]
        for i in range(2, 6):
            gi0 = Lz[i][0] * c - Lz[i][1] * s
            gi1 = Lz[i][0] * s + Lz[i][1] * c
            K.append((-gi0, -gi1))
        a_u_obs = m00 * fu + m02 * tr
        a_v_obs = m10 * fu + m12 * tr

        def pos_deriv(p0, p1, p2, p3, p4, p5):
            ex = yx - p0
            ey = yy - p1
            return (
                c * p2 - s * p3 + K[0][0] * ex + K[0][1] * ey,
                s * p2 + c * p3 + K[1][0] * ex + K[1][1] * ey,
                p4 + a_u_obs + K[2][0] * ex + K[2][1] * ey,
                p5 + a_v_obs + K[3][0] * ex + K[3][1] * ey,
                K[4][0] * ex + K[4][1] * ey,
                K[5][0] * ex + K[5][1] * ey,
            )

        p1_ = pos_deriv(xh, yh, uh, vh, suh, svh)
        p2_ = pos_deriv(xh + hh * p1_[0], yh + hh * p1_[1], uh + hh * p1_[2],
                        vh + hh * p1_[3], suh + hh * p1_[4], svh + hh * p1_[5])
        p3_ = pos_deriv(xh + hh * p2_[0], yh + hh * p2_[1], uh + hh * p2_[2],
                        vh + hh * p2_[3], suh + hh * p2_[4], svh + hh * p2_[5])
        p4_ = pos_deriv(xh + dt * p3_[0], yh + dt * p3_[1], uh + dt * p3_[2],
                        vh + dt * p3_[3], suh + dt * p3_[4], svh + dt * p3_[5])
        xh += w * (p1_[0] + 2.0 * p2_[0] + 2.0 * p3_[0] + p4_[0])
        yh += w * (p1_[1] + 2.0 * p2_[1] + 2.0 * p3_[1] + p4_[1])
        uh += w * (p1_[2] + 2.0 * p2_[2] + 2.0 * p3_[2] + p4_[2])
        vh += w * (p1_[3] + 2.0 * p2_[3] + 2.0 * p3_[3] + p4_[3])
        suh += w * (p1_[4] + 2.0 * p2_[4] + 2.0 * p3_[4] + p4_[4])
        svh += w * (p1_[5] + 2.0 * p2_[5] + 2.0 * p3_[5] + p4_[5])

        bound = 1e12
        if not (abs(x) < bound and abs(y) < bound and abs(psi) < bound
                and abs(u) < bound and abs(v) < bound and abs(r) < bound
                and abs(ph) < bound and abs(rh) < bound and abs(sh) < bound
                and abs(xh) < bound and abs(yh) < bound and abs(uh) < bound
                and abs(vh) < bound and abs(suh) < bound and abs(svh) < bound):
            raise DivergedError(k + 1)

    return {
        "eta": out_eta,
        "nu": out_nu,
        "sigma": out_sigma,
        "meas": out_meas,
        "est_rot": out_rot,
        "est_pos": out_pos,
    }

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel: plant + observers co-integration.

Mirrors _core_py.simulate operation-for-operation so both engines produce
identical trajectories; keep the arithmetic in the same order when editing
either file.
"""

from libc.math cimport cos, sin, fabs

import numpy as np


MODE_FULL = 0
MODE_SURROGATE = 1


def simulate(int mode, double dt, int n_steps, par, minv, L_psi, Lpz,
             tau, tauw, sigma_pre, noise, eta0, nu0, rot0, pos0):
    """Run the co-integration loop; returns a dict of (n_steps+1, .) arrays."""
    cdef double[::1] par_v = np.ascontiguousarray(par, dtype=np.float64)
    cdef double cu = par_v[0], cv = par_v[1], cr = par_v[2]
    cdef double X_u = par_v[3], X_uu = par_v[4]
    cdef double Y_v = par_v[5], Y_vv = par_v[6], Y_vr = par_v[7]
    cdef double Y_r = par_v[8], Y_rv = par_v[9], Y_rr = par_v[10]
    cdef double N_v = par_v[11], N_vv = par_v[12], N_vr = par_v[13]
    cdef double N_r = par_v[14], N_rv = par_v[15], N_rr = par_v[16]

    cdef double[:, ::1] mi = np.ascontiguousarray(minv, dtype=np.float64)
    cdef double m00 = mi[0, 0], m01 = mi[0, 1], m02 = mi[0, 2]
    cdef double m10 = mi[1, 0], m11 = mi[1, 1], m12 = mi[1, 2]
    cdef double m20 = mi[2, 0], m21 = mi[2, 1], m22 = mi[2, 2]

    cdef double[::1] lp = np.ascontiguousarray(L_psi, dtype=np.float64)
    cdef double l1 = lp[0], l2 = lp[1], l3 = lp[2]
    cdef double[:, ::1] Lz = np.ascontiguousarray(Lpz, dtype=np.float64)

    cdef double[:, ::1] tau_v = np.ascontiguousarray(tau, dtype=np.float64)
    cdef double[:, ::1] tauw_v = np.ascontiguousarray(tauw, dtype=np.float64)
    cdef double[:, ::1] sig_v = np.ascontiguousarray(sigma_pre, dtype=np.float64)
    cdef double[:, ::1] noise_v = np.ascontiguousarray(noise, dtype=np.float64)

    cdef double[::1] eta0_v = np.ascontiguousarray(eta0, dtype=np.float64)
    cdef double[::1] nu0_v = np.ascontiguousarray(nu0, dtype=np.float64)
    cdef double[::1] rot0_v = np.ascontiguousarray(rot0, dtype=np.float64)
    cdef double[::1] pos0_v = np.ascontiguousarray(pos0, dtype=np.float64)

    cdef double x = eta0_v[0], y = eta0_v[1], psi = eta0_v[2]
    cdef double u = nu0_v[0], v = nu0_v[1], r = nu0_v[2]
    cdef double ph = rot0_v[0], rh = rot0_v[1], sh = rot0_v[2]
    cdef double xh = pos0_v[0], yh = pos0_v[1], uh = pos0_v[2]
    cdef double vh = pos0_v[3], suh = pos0_v[4], svh = pos0_v[5]

    cdef int n_out = n_steps + 1
    out_eta = np.empty((n_out, 3))
    out_nu = np.empty((n_out, 3))
    out_sigma = np.empty((n_out, 3))
    out_meas = np.empty((n_out, 3))
    out_rot = np.empty((n_out, 3))
    out_pos = np.empty((n_out, 6))
    cdef double[:, ::1] o_eta = out_eta
    cdef double[:, ::1] o_nu = out_nu
    cdef double[:, ::1] o_sigma = out_sigma
    cdef double[:, ::1] o_meas = out_meas
    cdef double[:, ::1] o_rot = out_rot
    cdef double[:, ::1] o_pos = out_pos

    cdef int k, i, diverged = 0
    cdef double fu, tr, fwu, fwv, twr, nx, ny
    cdef double sg0, sg1, sg2, yx, yy, ypsi
    cdef double hh = 0.5 * dt, w = dt / 6.0
    cdef double c13, c23, d11, d22, d23, d32, d33, f1, f2, f3
    cdef double c, s, bound = 1e12
    cdef double a_u, a_v, a_r
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double st[6]
    cdef double q1[3]
    cdef double q2[3]
    cdef double q3[3]
    cdef double q4[3]
    cdef double g0, g1
    cdef double K[6][2]
    cdef double p1[6]
    cdef double p2[6]
    cdef double p3[6]
    cdef double p4[6]
    cdef double ex, ey, e

    for k in range(n_out):
        fu = tau_v[k, 0]
        tr = tau_v[k, 1]
        fwu = tauw_v[k, 0]
        fwv = tauw_v[k, 1]
        twr = tauw_v[k, 2]
        nx = noise_v[k, 0]
        ny = noise_v[k, 1]

        if mode == 0:
            c13 = -cv * v - cr * r
            c23 = cu * u
            d11 = -(X_u + X_uu * fabs(u))
            d22 = -(Y_v + Y_vv * fabs(v) + Y_vr * fabs(r))
            d23 = -(Y_r + Y_rv * fabs(v) + Y_rr * fabs(r))
            d32 = -(N_v + N_vv * fabs(v) + N_vr * fabs(r))
            d33 = -(N_r + N_rv * fabs(v) + N_rr * fabs(r))
            f1 = fwu - c13 * r - d11 * u
            f2 = fwv - c23 * r - (d22 * v + d23 * r)
            f3 = twr - (-c13 * u - c23 * v) - (d32 * v + d33 * r)
            sg0 = m00 * f1 + m01 * f2 + m02 * f3
            sg1 = m10 * f1 + m11 * f2 + m12 * f3
            sg2 = m20 * f1 + m21 * f2 + m22 * f3
        else:
            sg0 = sig_v[k, 0]
            sg1 = sig_v[k, 1]
            sg2 = sig_v[k, 2]

        yx = x + nx
        yy = y + ny
        ypsi = psi

        o_eta[k, 0] = x
        o_eta[k, 1] = y
        o_eta[k, 2] = psi
        o_nu[k, 0] = u
        o_nu[k, 1] = v
        o_nu[k, 2] = r
        o_sigma[k, 0] = sg0
        o_sigma[k, 1] = sg1
        o_sigma[k, 2] = sg2
        o_meas[k, 0] = yx
        o_meas[k, 1] = yy
        o_meas[k, 2] = ypsi
        o_rot[k, 0] = ph
        o_rot[k, 1] = rh
        o_rot[k, 2] = sh
        o_pos[k, 0] = xh
        o_pos[k, 1] = yh
        o_pos[k, 2] = uh
        o_pos[k, 3] = vh
        o_pos[k, 4] = suh
        o_pos[k, 5] = svh
        if k == n_steps:
            break

        # ---- plant RK4 (inputs held) ----
        if mode == 0:
            st[0] = x; st[1] = y; st[2] = psi; st[3] = u; st[4] = v; st[5] = r
            _full_deriv(st, fu, tr, fwu, fwv, twr,
                        cu, cv, cr, X_u, X_uu, Y_v, Y_vv, Y_vr, Y_r, Y_rv, Y_rr,
                        N_v, N_vv, N_vr, N_r, N_rv, N_rr,
                        m00, m01, m02, m10, m11, m12, m20, m21, m22, k1)
            st[0] = x + hh * k1[0]; st[1] = y + hh * k1[1]; st[2] = psi + hh * k1[2]
            st[3] = u + hh * k1[3]; st[4] = v + hh * k1[4]; st[5] = r + hh * k1[5]
            _full_deriv(st, fu, tr, fwu, fwv, twr,
                        cu, cv, cr, X_u, X_uu, Y_v, Y_vv, Y_vr, Y_r, Y_rv, Y_rr,
                        N_v, N_vv, N_vr, N_r, N_rv, N_rr,
                        m00, m01, m02, m10, m11, m12, m20, m21, m22, k2)
            st[0] = x + hh * k2[0]; st[1] = y + hh * k2[1]; st[2] = psi + hh * k2[2]
            st[3] = u + hh * k2[3]; st[4] = v + hh * k2[4]; st[5] = r + hh * k2[5]
            _full_deriv(st, fu, tr, fwu, fwv, twr,
                        cu, cv, cr, X_u, X_uu, Y_v, Y_vv, Y_vr, Y_r, Y_rv, Y_rr,
                        N_v, N_vv, N_vr, N_r, N_rv, N_rr,
                        m00, m01, m02, m10, m11, m12, m20, m21, m22, k3)
            st[0] = x + dt * k3[0]; st[1] = y + dt * k3[1]; st[2] = psi + dt * k3[2]
            st[3] = u + dt * k3[3]; st[4] = v + dt * k3[4]; st[5] = r + dt * k3[5]
            _full_deriv(st, fu, tr, fwu, fwv, twr,
                        cu, cv, cr, X_u, X_uu, Y_v, Y_vv, Y_vr, Y_r, Y_rv, Y_rr,
                        N_v, N_vv, N_vr, N_r, N_rv, N_rr,
                        m00, m01, m02, m10, m11, m12, m20, m21, m22, k4)
        else:
            a_u = m00 * fu + m02 * tr
            a_v = m10 * fu + m12 * tr
            a_r = m20 * fu + m22 * tr
            st[0] = x; st[1] = y; st[2] = psi; st[3] = u; st[4] = v; st[5] = r
            _surr_deriv(st, a_u + sg0, a_v + sg1, a_r + sg2, k1)
            st[0] = x + hh * k1[0]; st[1] = y + hh * k1[1]; st[2] = psi + hh * k1[2]
            st[3] = u + hh * k1[3]; st[4] = v + hh * k1[4]; st[5] = r + hh * k1[5]
            _surr_deriv(st, a_u + sg0, a_v + sg1, a_r + sg2, k2)
            st[0] = x + hh * k2[0]; st[1] = y + hh * k2[1]; st[2] = psi + hh * k2[2]
            st[3] = u + hh * k2[3]; st[4] = v + hh * k2[4]; st[5] = r + hh * k2[5]
            _surr_deriv(st, a_u + sg0, a_v + sg1, a_r + sg2, k3)
            st[0] = x + dt * k3[0]; st[1] = y + dt * k3[1]; st[2] = psi + dt * k3[2]
            st[3] = u + dt * k3[3]; st[4] = v + dt * k3[4]; st[5] = r + dt * k3[5]
            _surr_deriv(st, a_u + sg0, a_v + sg1, a_r + sg2, k4)

        x = x + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y = y + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        psi = psi + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        u = u + w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        v = v + w * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
        r = r + w * (k1[5] + 2.0 * k2[5] + 2.0 * k3[5] + k4[5])

        # ---- rotational observer RK4 (y_psi, tau held) ----
        a_r = m20 * fu + m22 * tr
        e = ypsi - ph
        q1[0] = rh + l1 * e; q1[1] = sh + a_r + l2 * e; q1[2] = l3 * e
        e = ypsi - (ph + hh * q1[0])
        q2[0] = (rh + hh * q1[1]) + l1 * e
        q2[1] = (sh + hh * q1[2]) + a_r + l2 * e
        q2[2] = l3 * e
        e = ypsi - (ph + hh * q2[0])
        q3[0] = (rh + hh * q2[1]) + l1 * e
        q3[1] = (sh + hh * q2[2]) + a_r + l2 * e
        q3[2] = l3 * e
        e = ypsi - (ph + dt * q3[0])
        q4[0] = (rh + dt * q3[1]) + l1 * e
        q4[1] = (sh + dt * q3[2]) + a_r + l2 * e
        q4[2] = l3 * e
        ph = ph + w * (q1[0] + 2.0 * q2[0] + 2.0 * q3[0] + q4[0])
        rh = rh + w * (q1[1] + 2.0 * q2[1] + 2.0 * q3[1] + q4[1])
        sh = sh + w * (q1[2] + 2.0 * q2[2] + 2.0 * q3[2] + q4[2])

        # ---- positional observer RK4 (y_p, psi_meas, tau held) ----
        c = cos(ypsi)
        s = sin(ypsi)
        g0 = Lz[0, 0] * c - Lz[0, 1] * s
        g1 = Lz[0, 0] * s + Lz[0, 1] * c
        K[0][0] = g0
        K[0][1] = g1
        g0 = Lz[1, 0] * c - Lz[1, 1] * s
        g1 = Lz[1, 0] * s + Lz[1, 1] * c
        K[1][0] = g0
        K[1][1] = g1
        # rows 0:2 get rotated by R2, all rows negated
        g0 = -(c * K[0][0] - s * K[1][0])
        g1 = -(c * K[0][1] - s * K[1][1])
        K[1][0] = -(s * K[0][0] + c * K[1][0])
        K[1][1] = -(s * K[0][1] + c * K[1][1])
        K[0][0] = g0
        K[0][1] = g1
        for i in range(2, 6):
            g0 = Lz[i, 0] * c - Lz[i, 1] * s
            g1 = Lz[i, 0] * s + Lz[i, 1] * c
            K[i][0] = -g0
            K[i][1] = -g1
        a_u = m00 * fu + m02 * tr
        a_v = m10 * fu + m12 * tr

        ex = yx - xh
        ey = yy - yh
        p1[0] = c * uh - s * vh + K[0][0] * ex + K[0][1] * ey
        p1[1] = s * uh + c * vh + K[1][0] * ex + K[1][1] * ey
        p1[2] = suh + a_u + K[2][0] * ex + K[2][1] * ey
        p1[3] = svh + a_v + K[3][0] * ex + K[3][1] * ey
        p1[4] = K[4][0] * ex + K[4][1] * ey
        p1[5] = K[5][0] * ex + K[5][1] * ey
        ex = yx - (xh + hh * p1[0])
        ey = yy - (yh + hh * p1[1])
        p2[0] = c * (uh + hh * p1[2]) - s * (vh + hh * p1[3]) + K[0][0] * ex + K[0][1] * ey
        p2[1] = s * (uh + hh * p1[2]) + c * (vh + hh * p1[3]) + K[1][0] * ex + K[1][1] * ey
        p2[2] = (suh + hh * p1[4]) + a_u + K[2][0] * ex + K[2][1] * ey
        p2[3] = (svh + hh * p1[5]) + a_v + K[3][0] * ex + K[3][1] * ey
        p2[4] = K[4][0] * ex + K[4][1] * ey
        p2[5] = K[5][0] * ex + K[5][1] * ey
        ex = yx - (xh + hh * p2[0])
        ey = yy - (yh + hh * p2[1])
        p3[0] = c * (uh + hh * p2[2]) - s * (vh + hh * p2[3]) + K[0][0] * ex + K[0][1] * ey
        p3[1] = s * (uh + hh * p2[2]) + c * (vh + hh * p2[3]) + K[1][0] * ex + K[1][1] * ey
        p3[2] = (suh + hh * p2[4]) + a_u + K[2][0] * ex + K[2][1] * ey
        p3[3] = (svh + hh * p2[5]) + a_v + K[3][0] * ex + K[3][1] * ey
        p3[4] = K[4][0] * ex + K[4][1] * ey
        p3[5] = K[5][0] * ex + K[5][1] * ey
        ex = yx - (xh + dt * p3[0])
        ey = yy - (yh + dt * p3[1])
        p4[0] = c * (uh + dt * p3[2]) - s * (vh + dt * p3[3]) + K[0][0] * ex + K[0][1] * ey
        p4[1] = s * (uh + dt * p3[2]) + c * (vh + dt * p3[3]) + K[1][0] * ex + K[1][1] * ey
        p4[2] = (suh + dt * p3[4]) + a_u + K[2][0] * ex + K[2][1] * ey
        p4[3] = (svh + dt * p3[5]) + a_v + K[3][0] * ex + K[3][1] * ey
        p4[4] = K[4][0] * ex + K[4][1] * ey
        p4[5] = K[5][0] * ex + K[5][1] * ey
        xh = xh + w * (p1[0] + 2.0 * p2[0] + 2.0 * p3[0] + p4[0])
        yh = yh + w * (p1[1] + 2.0 * p2[1] + 2.0 * p3[1] + p4[1])
        uh = uh + w * (p1[2] + 2.0 * p2[2] + 2.0 * p3[2] + p4[2])
        vh = vh + w * (p1[3] + 2.0 * p2[3] + 2.0 * p3[3] + p4[3])
        suh = suh + w * (p1[4] + 2.0 * p2[4] + 2.0 * p3[4] + p4[4])
        svh = svh + w * (p1[5] + 2.0 * p2[5] + 2.0 * p3[5] + p4[5])

        if not (fabs(x) < bound and fabs(y) < bound and fabs(psi) < bound
                and fabs(u) < bound and fabs(v) < bound and fabs(r) < bound
                and fabs(ph) < bound and fabs(rh) < bound and fabs(sh) < bound
                and fabs(xh) < bound and fabs(yh) < bound and fabs(uh) < bound
                and fabs(vh) < bound and fabs(suh) < bound and fabs(svh) < bound):
            diverged = k + 1
            break

    if diverged:
        raise RuntimeError(f"simulation diverged at step {diverged}")

    return {
        "eta": out_eta,
        "nu": out_nu,
        "sigma": out_sigma,
        "meas": out_meas,
        "est_rot": out_rot,
        "est_pos": out_pos,
    }


cdef inline void _full_deriv(double* st, double fu, double tr,
                             double fwu, double fwv, double twr,
                             double cu, double cv, double cr,
                             double X_u, double X_uu,
                             double Y_v, double Y_vv, double Y_vr,
                             double Y_r, double Y_rv, double Y_rr,
                             double N_v, double N_vv, double N_vr,
                             double N_r, double N_rv, double N_rr,
                             double m00, double m01, double m02,
                             double m10, double m11, double m12,
                             double m20, double m21, double m22,
                             double* out) noexcept nogil:
    cdef double pu = st[3], pv = st[4], pr = st[5]
    cdef double c = cos(st[2]), s = sin(st[2])
    cdef double c13 = -cv * pv - cr * pr
    cdef double c23 = cu * pu
    cdef double d11 = -(X_u + X_uu * fabs(pu))
    cdef double d22 = -(Y_v + Y_vv * fabs(pv) + Y_vr * fabs(pr))
    cdef double d23 = -(Y_r + Y_rv * fabs(pv) + Y_rr * fabs(pr))
    cdef double d32 = -(N_v + N_vv * fabs(pv) + N_vr * fabs(pr))
    cdef double d33 = -(N_r + N_rv * fabs(pv) + N_rr * fabs(pr))
    cdef double f1 = fu + fwu - c13 * pr - d11 * pu
    cdef double f2 = fwv - c23 * pr - (d22 * pv + d23 * pr)
    cdef double f3 = tr + twr - (-c13 * pu - c23 * pv) - (d32 * pv + d33 * pr)
    out[0] = c * pu - s * pv
    out[1] = s * pu + c * pv
    out[2] = pr
    out[3] = m00 * f1 + m01 * f2 + m02 * f3
    out[4] = m10 * f1 + m11 * f2 + m12 * f3
    out[5] = m20 * f1 + m21 * f2 + m22 * f3


cdef inline void _surr_deriv(double* st, double au, double av, double ar,
                             double* out) noexcept nogil:
    cdef double c = cos(st[2]), s = sin(st[2])
    out[0] = c * st[3] - s * st[4]
    out[1] = s * st[3] + c * st[4]
    out[2] = st[5]
    out[3] = au
    out[4] = av
    out[5] = ar

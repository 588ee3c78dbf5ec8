# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: closed-form coefficients on (node, z) grids and the
Euler-Maruyama centre-of-mass integrator."""
import numpy as np
from libc.math cimport floor, sqrt


def motion_grid(double kappa, double gamma, double eta,
                const double[::1] delta_a, const double[::1] delta_c,
                const double[::1] G, const double[::1] dG, const double[::1] S):
    """Friction, dipole diffusion, excitation and mean force on a node x z grid."""
    cdef Py_ssize_t nn = delta_a.shape[0], nz = G.shape[0], i, j
    beta = np.empty((nn, nz))
    ddip = np.empty((nn, nz))
    exc = np.empty((nn, nz))
    force = np.empty((nn, nz))
    cdef double[:, ::1] b = beta, d = ddip, e = exc, f = force
    cdef double da, dc, kc2, re, im, d2, d4, d6, g, gg, s, dg2, e2 = eta * eta
    cdef double cross, lin
    for i in range(nn):
        da = delta_a[i]
        dc = delta_c[i]
        kc2 = kappa * kappa + dc * dc
        lin = kappa * da + gamma * dc
        for j in range(nz):
            g = G[j]
            gg = dG[j]
            s = S[j]
            re = kappa * gamma - da * dc + g
            d2 = re * re + lin * lin
            d4 = d2 * d2
            d6 = d4 * d2
            dg2 = gg * gg
            cross = kappa * da + 2.0 * dc * (
                kappa + gamma + kappa * (kappa * gamma - dc * da + 0.5 * g) / kc2)
            b[i, j] = (-e2 / d4 * dg2 * cross
                       + 4.0 * e2 / d6 * dg2 * dc * lin * (
                           kappa * kappa * da + gamma * gamma * dc
                           + (da + dc) * (da * dc - g))
                       + 4.0 * e2 / d2 * kappa * dc / kc2 * s)
            d[i, j] = 2.0 * e2 / d2 * (kappa * s + dg2 * dc * lin / d2)
            e[i, j] = e2 * kc2 / d2
            f[i, j] = -e2 * dc * gg / d2
    return beta, ddip, exc, force


def em_run(double[::1] x, double[::1] p, const double[:, ::1] normals,
           const double[::1] tab_f, const double[::1] tab_beta,
           const double[::1] tab_d, double z_start, double period,
           double dt, double inv_mass,
           double[::1] p2_acc, double[::1] p4_acc,
           double[::1] p2_traj, Py_ssize_t traj_from):
    """Advance every trajectory through ``normals.shape[1]`` steps in place.

    Coefficients are linearly interpolated from periodic tables. Returns
    ``(-1, -1, 0.0)`` on success or ``(traj, step, x)`` at the first point
    where the interpolated diffusion is negative. Steps ``k >= traj_from``
    also add p^2 to the per-trajectory sums ``p2_traj``.
    """
    cdef Py_ssize_t nt = normals.shape[0], ns = normals.shape[1]
    cdef Py_ssize_t nt_tab = tab_f.shape[0], t, k, i0, i1
    cdef double xi, pi, u, w, fx, bx, dx, sdt = sqrt(dt), scale = nt_tab / period
    for t in range(nt):
        xi = x[t]
        pi = p[t]
        for k in range(ns):
            if nt_tab == 1:
                fx = tab_f[0]
                bx = tab_beta[0]
                dx = tab_d[0]
            else:
                u = (xi - z_start) * scale
                u = u - nt_tab * floor(u / nt_tab)
                i0 = <Py_ssize_t> floor(u)
                if i0 >= nt_tab:
                    i0 = nt_tab - 1
                w = u - i0
                i1 = i0 + 1
                if i1 == nt_tab:
                    i1 = 0
                fx = tab_f[i0] + w * (tab_f[i1] - tab_f[i0])
                bx = tab_beta[i0] + w * (tab_beta[i1] - tab_beta[i0])
                dx = tab_d[i0] + w * (tab_d[i1] - tab_d[i0])
            if dx < 0.0:
                x[t] = xi
                p[t] = pi
                return t, k, xi
            # position update uses the pre-step momentum
            xi = xi + pi * inv_mass * dt
            pi = pi + (fx + bx * pi * inv_mass) * dt + sqrt(dx) * sdt * normals[t, k]
            p2_acc[k] += pi * pi
            p4_acc[k] += pi * pi * pi * pi
            if k >= traj_from:
                p2_traj[t] += pi * pi
        x[t] = xi
        p[t] = pi
    return -1, -1, 0.0

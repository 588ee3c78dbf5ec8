"""Pure numpy implementations of the compiled kernels (same signatures)."""
import numpy as np

from . import linres


def motion_grid(kappa, gamma, eta, delta_a, delta_c, G, dG, S):
    da = np.asarray(delta_a, dtype=float)[:, None]
    dc = np.asarray(delta_c, dtype=float)[:, None]
    G = np.asarray(G, dtype=float)[None, :]
    dG = np.asarray(dG, dtype=float)[None, :]
    S = np.asarray(S, dtype=float)[None, :]
    beta = linres.friction_terms(kappa, gamma, da, dc, eta, G, dG, S)
    ddip = linres.diffusion_dipole_terms(kappa, gamma, da, dc, eta, G, dG, S)
    exc = linres.excitation_terms(kappa, gamma, da, dc, eta, G)
    force = linres.force_terms(kappa, gamma, da, dc, eta, G, dG)
    shape = (da.shape[0], G.shape[1])
    return tuple(np.broadcast_to(a, shape).copy() for a in (beta, ddip, exc, force))


def em_run(x, p, normals, tab_f, tab_beta, tab_d, z_start, period, dt, inv_mass,
           p2_acc, p4_acc, p2_traj, traj_from):
    n_tab = len(tab_f)
    sdt = np.sqrt(dt)
    for k in range(normals.shape[1]):
        if n_tab == 1:
            fx, bx, dx = tab_f[0], tab_beta[0], np.full_like(x, tab_d[0])
        else:
            u = np.mod((x - z_start) * (n_tab / period), n_tab)
            i0 = np.minimum(np.floor(u).astype(np.intp), n_tab - 1)
            w = u - i0
            i1 = (i0 + 1) % n_tab
            fx = tab_f[i0] + w * (tab_f[i1] - tab_f[i0])
            bx = tab_beta[i0] + w * (tab_beta[i1] - tab_beta[i0])
            dx = tab_d[i0] + w * (tab_d[i1] - tab_d[i0])
        bad = np.flatnonzero(dx < 0.0)
        if bad.size:
            t = int(bad[0])
            return t, k, float(x[t])
        x_new = x + p * inv_mass * dt
        p[:] = p + (fx + bx * p * inv_mass) * dt + np.sqrt(dx) * sdt * normals[:, k]
        x[:] = x_new
        p2 = p * p
        p2_acc[k] += p2.sum()
        p4_acc[k] += (p2 * p2).sum()
        if k >= traj_from:
            p2_traj += p2
    return -1, -1, 0.0

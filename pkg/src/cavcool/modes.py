"""Degenerate even-index Hermite-Gaussian modes of a confocal cavity on axis.

Mode (2n, 2m), 0 <= n, m <= N, has on-axis amplitude

    g_nm(z) = g * sqrt(w_n w_m) * E(z) * cos(z - (2n + 2m + 1) atan(z / z0))

with w_n = (2n-1)!!/(2n)!! the squared on-axis value of the even Hermite
function of order 2n and E(z) = (1 + (z/z0)^2)^(-1/2) the axial envelope.
Positions are in units of 1/k. The weights are chosen so that at the waist the
whole family acts as one mode with coupling g * (2N+1)!!/(2N)!!.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_GOUY_SCALE = 2.0 * math.pi * 1.0e4


@dataclass(frozen=True)
class ModeSet:
    n_index_max: int = 0
    g_single: float = 3.0
    gouy_scale: float = DEFAULT_GOUY_SCALE
    envelope_on: bool = True

    def __post_init__(self):
        if int(self.n_index_max) != self.n_index_max or self.n_index_max < 0:
            raise ValueError("n_index_max must be a non-negative integer")
        if not self.gouy_scale > 0:
            raise ValueError("gouy_scale must be positive")
        if not self.g_single >= 0:
            raise ValueError("g_single must be non-negative")

    @property
    def mode_count(self) -> int:
        return (self.n_index_max + 1) ** 2

    @property
    def g_eff(self) -> float:
        return effective_coupling(self.n_index_max, self.g_single)

    def indices(self):
        N = self.n_index_max
        return [(n, m) for n in range(N + 1) for m in range(N + 1)]


@dataclass(frozen=True)
class CouplingSums:
    """Aggregate coupling sums; fields are scalars or arrays over positions.

    G = sum |g_k|^2, Gamma = sum g_k d_z g_k^*, dG_dz = Gamma + Gamma^*,
    sum_dg_sq = sum (d_z g_k)^2 (real mode functions).
    """
    G: np.ndarray
    Gamma: np.ndarray
    dG_dz: np.ndarray
    sum_dg_sq: np.ndarray

    @classmethod
    def single_mode(cls, g, dg):
        """Sums for one real mode with coupling ``g`` and gradient ``dg``."""
        g = np.asarray(g, dtype=float)
        dg = np.asarray(dg, dtype=float)
        gamma = (g * dg).astype(complex)
        return cls(G=g * g, Gamma=gamma, dG_dz=2.0 * g * dg, sum_dg_sq=dg * dg)

    @classmethod
    def from_modes(cls, g_modes, dg_modes):
        """Sums over an explicit list of real mode couplings and gradients."""
        g_modes = np.asarray(g_modes, dtype=float)
        dg_modes = np.asarray(dg_modes, dtype=float)
        gamma = np.sum(g_modes * dg_modes, axis=0).astype(complex)
        return cls(G=np.sum(g_modes**2, axis=0), Gamma=gamma,
                   dG_dz=2.0 * gamma.real, sum_dg_sq=np.sum(dg_modes**2, axis=0))


def onaxis_weight(n: int) -> float:
    """(2n-1)!!/(2n)!! as a running product; w_0 = 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    w = 1.0
    for j in range(1, n + 1):
        w *= (2 * j - 1) / (2 * j)
    return w


def onaxis_weights(N: int) -> np.ndarray:
    w = np.empty(N + 1)
    w[0] = 1.0
    for j in range(1, N + 1):
        w[j] = w[j - 1] * (2 * j - 1) / (2 * j)
    return w


def enhancement_factor(N: int) -> float:
    """(2N+1)!!/(2N)!! computed as prod_{j=1..N} (2j+1)/(2j)."""
    if N < 0:
        raise ValueError("N must be non-negative")
    f = 1.0
    for j in range(1, N + 1):
        f *= (2 * j + 1) / (2 * j)
    return f


def effective_coupling(N: int, g: float) -> float:
    if g < 0:
        raise ValueError("g must be non-negative")
    return g * enhancement_factor(N)


def envelope(mode_set: ModeSet, z):
    z = np.asarray(z, dtype=float)
    if not mode_set.envelope_on:
        return np.ones_like(z)
    return 1.0 / np.sqrt(1.0 + (z / mode_set.gouy_scale) ** 2)


def _envelope_and_derivative(mode_set, z):
    if not mode_set.envelope_on:
        return np.ones_like(z), np.zeros_like(z)
    u = z / mode_set.gouy_scale
    E = 1.0 / np.sqrt(1.0 + u * u)
    return E, -u / mode_set.gouy_scale * E**3


def _phase_and_derivative(mode_set, z, order):
    """Axial phase kz - order*atan(z/z0) and its z-derivative."""
    z0 = mode_set.gouy_scale
    u = z / z0
    return z - order * np.arctan(u), 1.0 - order / (z0 * (1.0 + u * u))


def _check_indices(mode_set, n, m):
    N = mode_set.n_index_max
    if not (0 <= n <= N and 0 <= m <= N):
        raise ValueError(f"mode indices ({n}, {m}) outside 0..{N}")


def mode_amplitude(mode_set: ModeSet, n: int, m: int, z):
    _check_indices(mode_set, n, m)
    z = np.asarray(z, dtype=float)
    amp = mode_set.g_single * math.sqrt(onaxis_weight(n) * onaxis_weight(m))
    phase, _ = _phase_and_derivative(mode_set, z, 2 * n + 2 * m + 1)
    return amp * envelope(mode_set, z) * np.cos(phase)


def mode_gradient(mode_set: ModeSet, n: int, m: int, z):
    """Exact z-derivative of :func:`mode_amplitude` (Gouy and envelope terms)."""
    _check_indices(mode_set, n, m)
    z = np.asarray(z, dtype=float)
    amp = mode_set.g_single * math.sqrt(onaxis_weight(n) * onaxis_weight(m))
    phase, dphase = _phase_and_derivative(mode_set, z, 2 * n + 2 * m + 1)
    E, dE = _envelope_and_derivative(mode_set, z)
    return amp * (dE * np.cos(phase) - E * np.sin(phase) * dphase)


def gouy_groups(mode_set: ModeSet):
    """Squared amplitudes summed over modes sharing the Gouy order 2s+1.

    Returns ``(orders, weights)`` where ``weights[s] = g^2 sum_{n+m=s} w_n w_m``.
    Every quadratic coupling sum depends on the modes only through these.
    """
    N = mode_set.n_index_max
    w = onaxis_weights(N)
    conv = np.convolve(w, w)
    orders = 2.0 * np.arange(2 * N + 1) + 1.0
    return orders, mode_set.g_single**2 * conv


def coupling_sums(mode_set: ModeSet, z) -> CouplingSums:
    """G, Gamma, dG/dz and sum (dg)^2 over all (N+1)^2 modes at ``z``.

    ``z`` may be a scalar or an array; the result fields have its shape.
    """
    z = np.asarray(z, dtype=float)
    orders, weights = gouy_groups(mode_set)
    zz = z[..., None]
    phase, dphase = _phase_and_derivative(mode_set, zz, orders)
    E, dE = _envelope_and_derivative(mode_set, zz)
    c, s = np.cos(phase), np.sin(phase)
    # per-group g/amp and dg/amp
    u = E * c
    du = dE * c - E * s * dphase
    G = np.sum(weights * u * u, axis=-1)
    half_dG = np.sum(weights * u * du, axis=-1)
    sum_dg_sq = np.sum(weights * du * du, axis=-1)
    return CouplingSums(G=G, Gamma=half_dG.astype(complex), dG_dz=2.0 * half_dG,
                        sum_dg_sq=sum_dg_sq)


def _G_and_slope(mode_set, z):
    s = coupling_sums(mode_set, z)
    return s.G, s.dG_dz


def local_coupling(mode_set: ModeSet, z: float, n_grid: int = 256) -> float:
    """sqrt of the maximum of G over one wavelength starting at ``z``.

    The maximum is located on a uniform grid and polished with one Newton
    step on dG/dz = 0.
    """
    if n_grid < 256:
        raise ValueError("n_grid must be at least 256")
    grid = z + np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    G, _ = _G_and_slope(mode_set, grid)
    i = int(np.argmax(G))
    zi = grid[i]
    h = 1e-4
    _, s0 = _G_and_slope(mode_set, zi)
    _, sp = _G_and_slope(mode_set, zi + h)
    _, sm = _G_and_slope(mode_set, zi - h)
    curv = (sp - sm) / (2 * h)
    best = G[i]
    if curv < 0:
        z_new = zi - s0 / curv
        if abs(z_new - zi) < 2.0 * math.pi / n_grid:
            G_new, _ = _G_and_slope(mode_set, z_new)
            best = max(best, float(G_new))
    return math.sqrt(max(best, 0.0))


def envelope_coupling(mode_set: ModeSet, z: float) -> float:
    """Root-sum-square coupling sqrt(sum_k |amplitude_k|^2) * E(z).

    Equals g_eff * E(z): the antinode coupling the family would have if all
    modes were in phase. Equivalently sqrt(2 <G>) over a wavelength.
    """
    return mode_set.g_eff * float(envelope(mode_set, z))


def resonant_detunings(g_loc: float, delta_diff: float):
    """Detunings with delta_a * delta_c = g_loc^2 and delta_a - delta_c = delta_diff.

    Both returned detunings are red (non-positive), with |delta_a| >= |delta_c|,
    so that the lower dressed state is pumped resonantly at an antinode.
    """
    if g_loc < 0:
        raise ValueError("g_loc must be non-negative")
    if not delta_diff < 0:
        raise ValueError("delta_diff must be negative for two red detunings")
    root = math.sqrt(delta_diff**2 + 4.0 * g_loc**2)
    delta_c = -2.0 * g_loc**2 / (abs(delta_diff) + root)
    return delta_c + delta_diff, delta_c

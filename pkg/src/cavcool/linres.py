"""Closed-form linear response of the driven atom-cavity system.

All quantities are in natural units (hbar = gamma = k = 1 when the record
uses gamma = 1). Friction ``beta`` is force per velocity (units hbar k^2), so
the friction force is ``beta * v``; negative values damp the motion.

The ``*_terms`` helpers take raw scalars or broadcastable arrays and are what
the bulk grid kernels call; the public functions take a
:class:`~cavcool.params.SystemParams` and a :class:`~cavcool.modes.CouplingSums`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modes import CouplingSums, ModeSet, mode_amplitude, mode_gradient


class SingularDeterminant(ArithmeticError):
    pass


def determinant_terms(kappa, gamma, delta_a, delta_c, G, omega=0.0):
    return (kappa - 1j * delta_c - 1j * omega) * (gamma - 1j * delta_a - 1j * omega) + G


def det_abs2_terms(kappa, gamma, delta_a, delta_c, G):
    """|D(0)|^2 written as a sum of squares (no complex arithmetic)."""
    re = kappa * gamma - delta_a * delta_c + G
    im = kappa * delta_a + gamma * delta_c
    return re * re + im * im


def friction_terms(kappa, gamma, delta_a, delta_c, eta, G, dG, sum_dg_sq):
    d2 = det_abs2_terms(kappa, gamma, delta_a, delta_c, G)
    d4 = d2 * d2
    d6 = d4 * d2
    kc2 = kappa**2 + delta_c**2
    e2 = eta * eta
    dG2 = dG * dG
    first = -e2 / d4 * dG2 * (
        kappa * delta_a
        + 2.0 * delta_c * (kappa + gamma
                           + kappa * (kappa * gamma - delta_c * delta_a + 0.5 * G) / kc2))
    second = 4.0 * e2 / d6 * dG2 * delta_c * (kappa * delta_a + gamma * delta_c) * (
        kappa**2 * delta_a + gamma**2 * delta_c
        + (delta_a + delta_c) * (delta_a * delta_c - G))
    third = 4.0 * e2 / d2 * kappa * delta_c / kc2 * sum_dg_sq
    return first + second + third


def diffusion_dipole_terms(kappa, gamma, delta_a, delta_c, eta, G, dG, sum_dg_sq):
    d2 = det_abs2_terms(kappa, gamma, delta_a, delta_c, G)
    return 2.0 * eta**2 / d2 * (
        kappa * sum_dg_sq
        + dG * dG * delta_c * (kappa * delta_a + gamma * delta_c) / d2)


def excitation_terms(kappa, gamma, delta_a, delta_c, eta, G):
    d2 = det_abs2_terms(kappa, gamma, delta_a, delta_c, G)
    return eta**2 * (kappa**2 + delta_c**2) / d2


def force_terms(kappa, gamma, delta_a, delta_c, eta, G, dG):
    d2 = det_abs2_terms(kappa, gamma, delta_a, delta_c, G)
    return -eta**2 * delta_c * dG / d2


def recoil_terms(gamma, u2bar, k_atom_ratio, excitation):
    return 2.0 * k_atom_ratio**2 * u2bar * gamma * excitation


# -- record-level API ---------------------------------------------------------

def determinant(params, sums: CouplingSums, omega=0.0):
    return determinant_terms(params.kappa, params.gamma, params.delta_a,
                             params.delta_c, sums.G, omega)


@dataclass
class InternalSteadyState:
    s0: complex
    alphas: np.ndarray
    s1: complex
    alphas1: np.ndarray
    eta: float = 0.0
    kappa: float = 0.0
    delta_c: float = 0.0
    g_modes: np.ndarray | None = None
    dg_modes: np.ndarray | None = None


def mode_profile(mode_set: ModeSet, z: float):
    """Per-mode couplings and gradients at a single position."""
    g = np.array([mode_amplitude(mode_set, n, m, z) for n, m in mode_set.indices()])
    dg = np.array([mode_gradient(mode_set, n, m, z) for n, m in mode_set.indices()])
    return g, dg


def steady_state_from_modes(params, g_modes, dg_modes) -> InternalSteadyState:
    """Zeroth- and first-order amplitudes for explicit real mode functions."""
    g = np.atleast_1d(np.asarray(g_modes, dtype=float))
    dg = np.atleast_1d(np.asarray(dg_modes, dtype=float))
    sums = CouplingSums.from_modes(g, dg)
    kappa, gamma, eta = params.kappa, params.gamma, params.eta
    kc = kappa - 1j * params.delta_c
    ga = gamma - 1j * params.delta_a
    D = kc * ga + sums.G
    if D == 0:
        raise SingularDeterminant(f"D(0) = 0 at {params}")
    dG = sums.dG_dz
    Gam = sums.Gamma
    s0 = eta * kc / D
    alphas = eta * g / D
    s1 = eta / D**3 * (kc**2 - sums.G) * dG + eta / D**2 * Gam
    alphas1 = (eta / D**3 * (kc + ga) * g * dG
               - eta / D**2 / kc * (D * dg - g * Gam))
    return InternalSteadyState(s0=complex(s0), alphas=alphas, s1=complex(s1),
                               alphas1=alphas1, eta=eta, kappa=kappa,
                               delta_c=params.delta_c, g_modes=g, dg_modes=dg)


def steady_state(params, mode_set: ModeSet, z: float) -> InternalSteadyState:
    g, dg = mode_profile(mode_set, z)
    return steady_state_from_modes(params, g, dg)


def atomic_excitation(state: InternalSteadyState) -> float:
    return abs(state.s0) ** 2


def excitation(params, sums: CouplingSums):
    """<sigma^+ sigma> = eta^2 (kappa^2 + delta_c^2) / |D|^2."""
    return excitation_terms(params.kappa, params.gamma, params.delta_a,
                            params.delta_c, params.eta, sums.G)


def photon_numbers(state: InternalSteadyState) -> np.ndarray:
    return np.abs(state.alphas) ** 2


def mean_force(state: InternalSteadyState) -> float:
    """<F> = i sum_i dg_i (s0^* alpha_i - alpha_i^* s0) for real modes."""
    dg = state.dg_modes
    inner = np.conj(state.s0) * state.alphas - np.conj(state.alphas) * state.s0
    return float(np.real(1j * np.sum(dg * inner)))


def mean_force_closed(params, sums: CouplingSums):
    return force_terms(params.kappa, params.gamma, params.delta_a, params.delta_c,
                       params.eta, sums.G, sums.dG_dz)


def friction_from_state(state: InternalSteadyState) -> float:
    """<F^(1)> assembled from the first-order amplitudes."""
    dg = state.dg_modes
    t = 1j * np.sum(dg * (np.conj(state.s0) * state.alphas1
                          + np.conj(state.s1) * state.alphas))
    return float(np.real(t + np.conj(t)))


def friction(params, sums: CouplingSums):
    """Standing-wave friction coefficient (force per velocity)."""
    return friction_terms(params.kappa, params.gamma, params.delta_a, params.delta_c,
                          params.eta, sums.G, sums.dG_dz, sums.sum_dg_sq)


def diffusion_dipole(params, sums: CouplingSums):
    return diffusion_dipole_terms(params.kappa, params.gamma, params.delta_a,
                                  params.delta_c, params.eta, sums.G, sums.dG_dz,
                                  sums.sum_dg_sq)


def diffusion_recoil(params, state_or_excitation):
    """2 k_A^2 u2bar gamma <sigma^+ sigma> (spontaneous-recoil diffusion)."""
    if isinstance(state_or_excitation, InternalSteadyState):
        exc = atomic_excitation(state_or_excitation)
    else:
        exc = state_or_excitation
    return recoil_terms(params.gamma, params.u2bar, params.k_atom_ratio, exc)


@dataclass
class MotionCoefficients:
    f_p: float
    beta: float
    d_dip: float
    d_rec: float
    excitation: float
    photons: np.ndarray

    @property
    def d_total(self):
        return self.d_dip + self.d_rec


def motion_coefficients(params, mode_set: ModeSet, z: float) -> MotionCoefficients:
    state = steady_state(params, mode_set, z)
    sums = CouplingSums.from_modes(state.g_modes, state.dg_modes)
    exc = atomic_excitation(state)
    return MotionCoefficients(
        f_p=float(mean_force_closed(params, sums)),
        beta=float(friction(params, sums)),
        d_dip=float(diffusion_dipole(params, sums)),
        d_rec=float(diffusion_recoil(params, exc)),
        excitation=exc,
        photons=photon_numbers(state),
    )

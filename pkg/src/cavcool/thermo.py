"""Wavelength-averaged thermodynamics, detuning maps, and mode-number and axial scans.

Conventions: friction ``beta`` is force per velocity (hbar k^2), so the
momentum variance relaxes at rate 2|beta|/m and the cooling time is
tau_c = m / (2|beta|) = 1 / (4 * recoil_freq * |beta|). The steady-state
temperature k_B T = D / (2|beta|) is mass independent and in units hbar*gamma.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .modes import (ModeSet, coupling_sums, effective_coupling, envelope_coupling,
                    local_coupling, resonant_detunings)

TWO_PI = 2.0 * math.pi


class QuadratureError(ArithmeticError):
    pass


class NoCoolingError(ValueError):
    """Raised when the averaged friction does not damp the motion."""


def _simpson(y, h):
    return h / 3.0 * (y[..., 0] + y[..., -1]
                      + 4.0 * y[..., 1:-1:2].sum(axis=-1)
                      + 2.0 * y[..., 2:-1:2].sum(axis=-1))


def spatial_average(evaluator, z_center=0.0, panels=256, rtol=1e-6, max_panels=1024):
    """(1/2pi) * integral of ``evaluator`` over [z_center, z_center + 2pi].

    Composite Simpson rule. The estimate is accepted when the Richardson error
    |S_n - S_{n/2}| / 15 is below ``rtol`` times the average of |f|; otherwise
    the panel count is doubled, up to ``max_panels``. ``evaluator`` maps an
    array of positions to values with positions on the last axis.
    """
    if panels % 4:
        raise ValueError("panels must be a multiple of 4")
    n = panels
    while True:
        z = z_center + np.linspace(0.0, TWO_PI, n + 1)
        y = np.asarray(evaluator(z), dtype=float)
        y = np.broadcast_to(y, y.shape[:-1] + (n + 1,)) if y.ndim else np.full(n + 1, float(y))
        h = TWO_PI / n
        fine = _simpson(y, h)
        coarse = _simpson(y[..., ::2], 2 * h)
        scale = _simpson(np.abs(y), h)
        err = np.abs(fine - coarse) / 15.0
        if np.all(err <= rtol * scale + 1e-300):
            return fine / TWO_PI
        if n >= max_panels:
            worst = float(np.max(err / np.maximum(scale, 1e-300)))
            raise QuadratureError(
                f"wavelength average not converged at {n} panels "
                f"(relative error estimate {worst:.2e})")
        n *= 2


def temperature(beta_avg, d_avg):
    """k_B T = D / (2|beta|) in hbar*gamma; requires beta_avg < 0."""
    if not beta_avg < 0:
        raise NoCoolingError(f"no cooling steady state (beta_avg = {beta_avg:.3e} >= 0)")
    return d_avg / (2.0 * abs(beta_avg))


def cooling_time(beta_avg, recoil_freq):
    """tau_c = m / (2|beta|) in 1/gamma, with m = 1/(2 recoil_freq)."""
    if not beta_avg < 0:
        raise NoCoolingError(f"no cooling steady state (beta_avg = {beta_avg:.3e} >= 0)")
    return 1.0 / (4.0 * recoil_freq * abs(beta_avg))


def spontaneous_photon_count(excitation_avg, beta_avg, recoil_freq, gamma=1.0):
    """Spontaneous emissions 2*gamma*<sigma^+ sigma> during one cooling time."""
    return 2.0 * gamma * excitation_avg * cooling_time(beta_avg, recoil_freq)


@dataclass
class ThermoReport:
    beta_avg: float
    d_dip_avg: float
    d_rec_avg: float
    excitation_avg: float
    force_avg: float
    recoil_freq: float
    gamma: float = 1.0
    heating: bool = field(init=False)
    temperature: float = field(init=False)
    cooling_time: float = field(init=False)
    n_spont: float = field(init=False)

    def __post_init__(self):
        self.heating = not self.beta_avg < 0
        if self.heating:
            self.temperature = self.cooling_time = self.n_spont = math.nan
        else:
            self.temperature = temperature(self.beta_avg, self.d_avg)
            self.cooling_time = cooling_time(self.beta_avg, self.recoil_freq)
            self.n_spont = spontaneous_photon_count(
                self.excitation_avg, self.beta_avg, self.recoil_freq, self.gamma)

    @property
    def d_avg(self):
        return self.d_dip_avg + self.d_rec_avg


def _grid_evaluator(params, mode_set, delta_a, delta_c, backend=None):
    kern = _kernels.get_backend(backend)
    da = np.ascontiguousarray(delta_a, dtype=float).ravel()
    dc = np.ascontiguousarray(delta_c, dtype=float).ravel()
    rec = 2.0 * params.k_atom_ratio**2 * params.u2bar * params.gamma

    def evaluate(z):
        s = coupling_sums(mode_set, z)
        beta, ddip, exc, force = kern.motion_grid(
            params.kappa, params.gamma, params.eta, da, dc,
            np.ascontiguousarray(s.G), np.ascontiguousarray(s.dG_dz),
            np.ascontiguousarray(s.sum_dg_sq))
        return np.stack([beta, ddip, rec * exc, exc, force])

    return evaluate


def averaged_coefficients(params, mode_set, z_center=0.0, delta_a=None, delta_c=None,
                          backend=None):
    """Wavelength averages of (beta, d_dip, d_rec, excitation, force).

    With ``delta_a``/``delta_c`` arrays the averages are computed on every
    node at once; the result then has shape ``(5, n_nodes)``.
    """
    da = params.delta_a if delta_a is None else delta_a
    dc = params.delta_c if delta_c is None else delta_c
    ev = _grid_evaluator(params, mode_set, np.atleast_1d(da), np.atleast_1d(dc), backend)
    return spatial_average(ev, z_center)


def thermo_report(params, mode_set, z_center=0.0, backend=None) -> ThermoReport:
    beta, ddip, drec, exc, force = averaged_coefficients(
        params, mode_set, z_center, backend=backend)[:, 0]
    return ThermoReport(beta_avg=float(beta), d_dip_avg=float(ddip), d_rec_avg=float(drec),
                        excitation_avg=float(exc), force_avg=float(force),
                        recoil_freq=params.recoil_freq, gamma=params.gamma)


@dataclass
class DetuningMap:
    delta_a: np.ndarray
    delta_c: np.ndarray
    beta: np.ndarray          # shape (len(delta_a), len(delta_c))
    d_dip: np.ndarray
    d_rec: np.ndarray
    excitation: np.ndarray

    @property
    def temperature(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (self.d_dip + self.d_rec) / (2.0 * np.abs(self.beta))
        return np.where(self.beta < 0, t, np.nan)

    def rows(self):
        """(delta_a, delta_c, beta, d_dip, d_rec, T) rows in grid-index order."""
        T = self.temperature
        for i, da in enumerate(self.delta_a):
            for j, dc in enumerate(self.delta_c):
                yield (da, dc, self.beta[i, j], self.d_dip[i, j], self.d_rec[i, j], T[i, j])


def detuning_map(params, mode_set, delta_a_values, delta_c_values, z_center=0.0,
                 backend=None) -> DetuningMap:
    """Wavelength-averaged coefficients on a rectangular (delta_a, delta_c) grid."""
    da = np.asarray(delta_a_values, dtype=float)
    dc = np.asarray(delta_c_values, dtype=float)
    A, C = np.meshgrid(da, dc, indexing="ij")
    avg = averaged_coefficients(params, mode_set, z_center, A.ravel(), C.ravel(), backend)
    shape = A.shape
    return DetuningMap(delta_a=da, delta_c=dc, beta=avg[0].reshape(shape),
                       d_dip=avg[1].reshape(shape), d_rec=avg[2].reshape(shape),
                       excitation=avg[3].reshape(shape))


def effective_mode(g_eff):
    """Single ideal standing wave (no Gouy phase, no envelope) of coupling g_eff."""
    return ModeSet(n_index_max=0, g_single=g_eff, gouy_scale=math.inf, envelope_on=False)


@dataclass
class ScanPoint:
    key: float                # N for modes_scan, z for position_scan
    g: float                  # g_eff or local coupling
    delta_a: float
    delta_c: float
    report: ThermoReport
    normalized_temperature: float = math.nan


def _modes_point(args):
    params, N, delta_diff, backend = args
    g_eff = effective_coupling(N, params.g_single)
    da, dc = resonant_detunings(g_eff, delta_diff)
    p = params.replace(delta_a=da, delta_c=dc)
    return ScanPoint(N, g_eff, da, dc, thermo_report(p, effective_mode(g_eff), 0.0, backend))


def _map_ordered(func, jobs, workers):
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(func, jobs))
    return [func(j) for j in jobs]


def modes_scan(params, N_list, delta_diff=-50.0, workers=None, backend=None):
    """Thermodynamics at the waist versus the number of degenerate modes.

    For each N the family is replaced by one effective mode of coupling
    g_eff(N); the detunings keep delta_a * delta_c = g_eff^2 and the fixed
    difference ``delta_diff``.
    """
    jobs = [(params, int(N), delta_diff, backend) for N in N_list]
    return _map_ordered(_modes_point, jobs, workers)


COUPLING_RULES = ("envelope", "max")


def _position_point(args):
    params, mode_set, z, delta_diff, rule, backend = args
    if rule == "envelope":
        g_loc = envelope_coupling(mode_set, z)
    elif rule == "max":
        g_loc = local_coupling(mode_set, z)
    else:
        raise ValueError(f"unknown coupling rule {rule!r}; choose from {COUPLING_RULES}")
    da, dc = resonant_detunings(g_loc, delta_diff)
    p = params.replace(delta_a=da, delta_c=dc)
    return ScanPoint(z, g_loc, da, dc, thermo_report(p, mode_set, z, backend))


def position_scan(params, mode_set, z_list, delta_diff=-50.0, coupling_rule="envelope",
                  workers=None, backend=None):
    """Temperature along the axis, re-tuned at every position, relative to z = 0.

    At each position the detunings are re-derived from the local coupling
    (``coupling_rule``: "envelope" = g_eff * E(z), "max" = sqrt(max G) over a
    wavelength) and the coefficients are averaged over one wavelength.
    """
    z_list = [float(z) for z in z_list]
    need_origin = 0.0 not in z_list
    jobs = [(params, mode_set, z, delta_diff, coupling_rule, backend)
            for z in ([0.0] if need_origin else []) + z_list]
    points = _map_ordered(_position_point, jobs, workers)
    origin = points[0] if need_origin else points[z_list.index(0.0)]
    t0 = origin.report.temperature
    for pt in points:
        pt.normalized_temperature = pt.report.temperature / t0
    return points[1:] if need_origin else points


def dephasing_length(N, gouy_scale):
    """Axial distance pi * l_cav / (4 (2N+1)) with l_cav = 2 * gouy_scale."""
    return math.pi * 2.0 * gouy_scale / (4.0 * (2 * N + 1))

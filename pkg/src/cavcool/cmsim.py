"""Stochastic centre-of-mass motion along the cavity axis.

Euler-Maruyama integration of

    dx = p/m dt
    dp = [f(x) + beta(x) p/m] dt + sqrt(D(x) dt) N(0, 1)

with D = d_dip + d_rec. Coefficients are either frozen constants or tabulated
over one wavelength and interpolated periodically. Every trajectory draws from
its own counter-based Philox stream keyed by (seed, trajectory index), so
results do not depend on how trajectories are scheduled.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from . import _kernels
from .modes import coupling_sums

FROZEN = "frozen"
POSITION = "position"


class SimulationError(RuntimeError):
    pass


class NegativeDiffusionError(SimulationError):
    pass


class ValidityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TrajectoryConfig:
    dt: float = 0.1
    n_steps: int = 10_000
    n_trajectories: int = 1000
    seed: int = 0
    p0_spread: float = 0.0
    coefficients: str = POSITION
    include_force: bool = True
    z_start: float = 0.0
    table_points: int = 1024
    frozen_beta: float | None = None
    frozen_diffusion: float | None = None
    burn_in: float = 0.5

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1 or self.n_trajectories < 2:
            raise ValueError("need n_steps >= 1 and n_trajectories >= 2")
        if self.coefficients not in (FROZEN, POSITION):
            raise ValueError(f"coefficients must be {FROZEN!r} or {POSITION!r}")
        if self.coefficients == FROZEN and (self.frozen_beta is None
                                            or self.frozen_diffusion is None):
            raise ValueError("frozen coefficients need frozen_beta and frozen_diffusion")
        if not 0 <= self.burn_in < 1:
            raise ValueError("burn_in must lie in [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class TrajectoryStats:
    t: np.ndarray
    p2_mean: np.ndarray
    p2_stderr: np.ndarray
    mass: float
    temperature: float
    temperature_stderr: float
    below_recoil_floor: bool
    config: TrajectoryConfig

    def rows(self):
        return zip(self.t, self.p2_mean, self.p2_stderr)


def coefficient_tables(params, mode_set, config: TrajectoryConfig, backend=None):
    """Force, friction and total diffusion on the tabulation grid."""
    if config.coefficients == FROZEN:
        return (np.zeros(1), np.array([float(config.frozen_beta)]),
                np.array([float(config.frozen_diffusion)]))
    z = config.z_start + np.linspace(0.0, 2.0 * math.pi, config.table_points, endpoint=False)
    s = coupling_sums(mode_set, z)
    kern = _kernels.get_backend(backend)
    beta, ddip, exc, force = kern.motion_grid(
        params.kappa, params.gamma, params.eta,
        np.array([params.delta_a], dtype=float), np.array([params.delta_c], dtype=float),
        np.ascontiguousarray(s.G), np.ascontiguousarray(s.dG_dz),
        np.ascontiguousarray(s.sum_dg_sq))
    drec = 2.0 * params.k_atom_ratio**2 * params.u2bar * params.gamma * exc[0]
    f = force[0] if config.include_force else np.zeros_like(force[0])
    return f, beta[0].copy(), ddip[0] + drec


def _streams(config):
    return [np.random.Generator(np.random.Philox(
        np.random.SeedSequence(config.seed, spawn_key=(i,))))
        for i in range(config.n_trajectories)]


def _chunk_size(n_traj):
    return int(max(64, min(4096, (1 << 22) // n_traj)))


def simulate(config: TrajectoryConfig, params, mode_set=None, backend=None) -> TrajectoryStats:
    """Integrate the ensemble and return momentum statistics versus time."""
    if config.coefficients == POSITION and mode_set is None:
        raise ValueError("position-resolved coefficients need a mode set")
    mass = params.mass
    inv_mass = 1.0 / mass
    tab_f, tab_beta, tab_d = coefficient_tables(params, mode_set, config, backend)
    if config.dt * np.max(np.abs(tab_beta)) * inv_mass >= 0.01:
        raise SimulationError(
            f"time step too large: dt*|beta|/m = {config.dt * np.max(np.abs(tab_beta)) * inv_mass:.3g}"
            " (must stay below 0.01)")
    kern = _kernels.get_backend(backend)

    streams = _streams(config)
    nt = config.n_trajectories
    x = np.empty(nt)
    p = np.empty(nt)
    for i, rng in enumerate(streams):
        x[i] = config.z_start + 2.0 * math.pi * rng.random()
        p[i] = config.p0_spread * rng.standard_normal()
    v_scale = max(config.p0_spread, math.sqrt(max(np.max(tab_d), 0.0) * mass
                                              / max(2.0 * np.max(np.abs(tab_beta)), 1e-300)))
    if len(tab_f) > 1 and config.dt * 3.0 * v_scale * inv_mass > 0.2:
        warnings.warn("dt * k v is not small; the coefficient tables are under-resolved",
                      ValidityWarning, stacklevel=2)

    p2 = np.zeros(config.n_steps + 1)
    p4 = np.zeros(config.n_steps + 1)
    p2[0] = np.sum(p * p)
    p4[0] = np.sum(p**4)
    # per-trajectory sums of p^2 over the stationary window (steps >= first)
    first = int(config.burn_in * config.n_steps)
    p2_traj = np.zeros(nt)
    chunk = _chunk_size(nt)
    done = 0
    while done < config.n_steps:
        m = min(chunk, config.n_steps - done)
        normals = np.empty((nt, m))
        for i, rng in enumerate(streams):
            normals[i] = rng.standard_normal(m)
        acc2 = np.zeros(m)
        acc4 = np.zeros(m)
        t_bad, k_bad, x_bad = kern.em_run(x, p, normals, tab_f, tab_beta, tab_d,
                                          config.z_start, 2.0 * math.pi, config.dt,
                                          inv_mass, acc2, acc4, p2_traj,
                                          max(first - done, 0))
        if t_bad >= 0:
            raise NegativeDiffusionError(
                f"negative diffusion at x = {x_bad:.6g} (trajectory {t_bad}, step "
                f"{done + k_bad}); unphysical regime for {params}")
        p2[done + 1:done + 1 + m] = acc2
        p4[done + 1:done + 1 + m] = acc4
        done += m

    p2_mean = p2 / nt
    var = np.maximum(p4 / nt - p2_mean**2, 0.0)
    p2_stderr = np.sqrt(var / (nt - 1))
    t = config.dt * np.arange(config.n_steps + 1)

    # trajectories are independent, so their time averages give the error bar
    per_traj = p2_traj / (config.n_steps - first) / mass
    temp = float(per_traj.mean())
    temp_err = float(per_traj.std(ddof=1) / math.sqrt(nt))
    floor = temp < 10.0 * params.recoil_freq
    if floor:
        warnings.warn(f"kinetic temperature {temp:.3g} below 10 T_rec; semiclassical "
                      "treatment of the motion is not valid", ValidityWarning, stacklevel=2)
    return TrajectoryStats(t=t, p2_mean=p2_mean, p2_stderr=p2_stderr, mass=mass,
                           temperature=temp, temperature_stderr=temp_err,
                           below_recoil_floor=bool(floor), config=config)


class CoolingFitError(SimulationError):
    pass


@dataclass
class CoolingFit:
    rate: float
    rate_stderr: float
    p2_initial: float
    p2_final: float
    monotone: bool


def cooling_curve(stats: TrajectoryStats, n_blocks=10) -> CoolingFit:
    """Fit <p^2>(t) = a + b exp(-r t); r should equal 2|beta|/m."""
    t, y, err = stats.t, stats.p2_mean, stats.p2_stderr
    drop = y[0] - y[-1]
    noise = np.max(err) + 1e-300
    if not drop > 5.0 * noise:
        raise CoolingFitError(
            f"no relaxation to fit: <p^2> changed by {drop:.3g} against noise {noise:.3g}")
    usable = len(y) - len(y) % n_blocks
    blocks = y[:usable].reshape(n_blocks, -1).mean(axis=1)
    block_err = err[:usable].reshape(n_blocks, -1).mean(axis=1)
    monotone = bool(np.all(np.diff(blocks) <= 3.0 * block_err[1:]))
    if not monotone:
        warnings.warn("non-monotone relaxation of <p^2>", ValidityWarning, stacklevel=2)
    half = y[-1] + 0.5 * drop
    t_half = t[np.argmax(y <= half)] or t[-1] / 10
    guess = (y[-1], drop, math.log(2.0) / t_half)
    sigma = np.maximum(err, 1e-12 * max(abs(y[0]), 1e-300))
    try:
        popt, pcov = curve_fit(lambda tt, a, b, r: a + b * np.exp(-r * tt), t, y,
                               p0=guess, sigma=sigma, maxfev=20000)
    except RuntimeError as exc:
        raise CoolingFitError(f"exponential fit failed: {exc}") from exc
    a, b, r = popt
    if not (r > 0 and b > 0):
        raise CoolingFitError(f"fit does not describe a decay (b={b:.3g}, r={r:.3g})")
    return CoolingFit(rate=float(r), rate_stderr=float(math.sqrt(max(pcov[2, 2], 0.0))),
                      p2_initial=float(a + b), p2_final=float(a), monotone=monotone)

"""Truncated-Fock master-equation oracle for force, friction and diffusion.

Independent of the closed forms: the full two-level atom (no linearization)
and up to two cavity modes are represented as dense matrices, the Lindblad
generator is built explicitly, and

* the mean force is Tr(F rho0),
* the friction follows from the first-order velocity correction rho1,
  L rho1 = d rho0/dz with L d rho0/dz = -(dL/dz) rho0,
* the momentum diffusion is the zero-frequency force-noise spectral density
  from the quantum regression theorem, 2 Re Tr[F (-L)^-1 (F rho0 - <F> rho0)].

Density matrices are vectorized row-major, vec(A rho B) = (A kron B^T) vec(rho).
Traceless solves use the system bordered by the trace functional, which is
non-singular whenever the steady state is unique.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import linres
from .modes import CouplingSums

MAX_DIM = 64
CUTOFF_TOLERANCE = 1e-6
PUMP_TARGETS = ("atom", "cavity")


class OracleError(ArithmeticError):
    pass


class CutoffWarning(UserWarning):
    pass


@dataclass(frozen=True)
class HilbertConfig:
    n_modes: int = 1
    n_max: int = 4
    pump_target: str = "atom"

    def __post_init__(self):
        if self.n_modes not in (1, 2):
            raise ValueError("the oracle supports 1 or 2 cavity modes")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.pump_target not in PUMP_TARGETS:
            raise ValueError(f"pump_target must be one of {PUMP_TARGETS}")
        if self.dim > MAX_DIM:
            raise ValueError(f"Hilbert space dimension {self.dim} exceeds {MAX_DIM}")

    @property
    def dim(self):
        return 2 * (self.n_max + 1) ** self.n_modes


def _kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _operators(config):
    """sigma and the mode annihilators on atom (x) mode_1 (x) ... ; atom basis (g, e)."""
    nf = config.n_max + 1
    a1 = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), 1).astype(complex)
    eye_f = np.eye(nf, dtype=complex)
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    sigma = _kron_all([sm] + [eye_f] * config.n_modes)
    modes = []
    for i in range(config.n_modes):
        facs = [np.eye(2, dtype=complex)] + [a1 if j == i else eye_f
                                             for j in range(config.n_modes)]
        modes.append(_kron_all(facs))
    return sigma, modes


def _commutator_super(H):
    n = H.shape[0]
    eye = np.eye(n)
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def _dissipator(c):
    n = c.shape[0]
    eye = np.eye(n)
    cdc = c.conj().T @ c
    return np.kron(c, c.conj()) - 0.5 * np.kron(cdc, eye) - 0.5 * np.kron(eye, cdc.T)


@dataclass
class Liouvillian:
    matrix: np.ndarray
    hamiltonian: np.ndarray
    sigma: np.ndarray
    modes: list
    config: HilbertConfig
    _lu: tuple | None = field(default=None, repr=False)

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    def trace_vector(self):
        return np.eye(self.dim).reshape(-1)

    def bordered_lu(self):
        if self._lu is None:
            n2 = self.matrix.shape[0]
            t = self.trace_vector()
            B = np.zeros((n2 + 1, n2 + 1), dtype=complex)
            B[:n2, :n2] = self.matrix
            B[:n2, n2] = t
            B[n2, :n2] = t
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                try:
                    self._lu = sla.lu_factor(B, check_finite=True)
                except (sla.LinAlgError, sla.LinAlgWarning) as exc:
                    raise OracleError(f"degenerate steady-state kernel: {exc}") from exc
        return self._lu

    def apply(self, rho):
        n = self.dim
        return (self.matrix @ np.asarray(rho).reshape(-1)).reshape(n, n)


def hamiltonian(params, g_modes, config: HilbertConfig, sigma=None, modes=None):
    if sigma is None:
        sigma, modes = _operators(config)
    g_modes = np.atleast_1d(np.asarray(g_modes, dtype=complex))
    if len(g_modes) != config.n_modes:
        raise ValueError(f"expected {config.n_modes} mode couplings, got {len(g_modes)}")
    sd = sigma.conj().T
    H = -params.delta_a * (sd @ sigma)
    for a in modes:
        H = H - params.delta_c * (a.conj().T @ a)
    pumped = sigma if config.pump_target == "atom" else modes[0]
    H = H - 1j * params.eta * (pumped - pumped.conj().T)
    for g, a in zip(g_modes, modes):
        H = H - 1j * (g * (sd @ a) - np.conj(g) * (a.conj().T @ sigma))
    return H


def build_liouvillian(params, g_modes, config: HilbertConfig | None = None) -> Liouvillian:
    """Lindblad generator with collapse rates 2 gamma (atom) and 2 kappa (each mode)."""
    config = config or HilbertConfig(n_modes=len(np.atleast_1d(g_modes)))
    sigma, modes = _operators(config)
    H = hamiltonian(params, g_modes, config, sigma, modes)
    L = _commutator_super(H) + _dissipator(math.sqrt(2.0 * params.gamma) * sigma)
    for a in modes:
        L = L + _dissipator(math.sqrt(2.0 * params.kappa) * a)
    return Liouvillian(matrix=L, hamiltonian=H, sigma=sigma, modes=modes, config=config)


def force_operator(liou: Liouvillian, dg_modes):
    """F = i sum_i [(dg_i) sigma^+ a_i - (dg_i^*) a_i^+ sigma]."""
    sd = liou.sigma.conj().T
    F = np.zeros_like(liou.hamiltonian)
    for dg, a in zip(np.atleast_1d(dg_modes), liou.modes):
        F = F + 1j * (dg * (sd @ a) - np.conj(dg) * (a.conj().T @ liou.sigma))
    return F


def _bordered_solve(liou, rhs, trace_value, tol=1e-10):
    n = liou.dim
    b = np.concatenate([np.asarray(rhs, dtype=complex).reshape(-1), [trace_value]])
    x = sla.lu_solve(liou.bordered_lu(), b)
    sol, lagrange = x[:-1], x[-1]
    resid = np.linalg.norm(liou.matrix @ sol - b[:-1])
    scale = max(np.linalg.norm(b[:-1]), abs(trace_value), 1e-300)
    if resid > tol * scale or abs(lagrange) > tol * scale:
        cond = np.linalg.cond(liou.matrix + np.outer(liou.trace_vector(), liou.trace_vector()))
        raise OracleError(
            f"ill-conditioned bordered solve: residual {resid:.2e}, "
            f"multiplier {abs(lagrange):.2e}, condition estimate {cond:.2e}")
    return sol.reshape(n, n)


def solve_traceless(liou: Liouvillian, rhs):
    """X with L X = rhs and Tr X = 0; rhs must itself be traceless."""
    return _bordered_solve(liou, rhs, 0.0)


def _check_cutoff(liou, rho):
    nf = liou.config.n_max + 1
    diag = np.real(np.diag(rho)).reshape([2] + [nf] * liou.config.n_modes)
    for i in range(liou.config.n_modes):
        top = np.take(diag, nf - 1, axis=i + 1).sum()
        if top > CUTOFF_TOLERANCE:
            warnings.warn(f"Fock cutoff n_max={liou.config.n_max} too small: mode {i} "
                          f"top-level population {top:.2e}", CutoffWarning, stacklevel=3)


def steady_density(liou: Liouvillian) -> np.ndarray:
    rho = _bordered_solve(liou, np.zeros(liou.dim**2), 1.0)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    if np.linalg.norm(liou.matrix @ rho.reshape(-1)) > 1e-10:
        raise OracleError("steady-state residual above 1e-10")
    _check_cutoff(liou, rho)
    return rho


def expect(op, rho):
    return np.trace(op @ rho)


def oracle_force(liou, rho, dg_modes):
    return float(expect(force_operator(liou, dg_modes), rho).real)


def oracle_friction(liou, rho0, dg_modes):
    """Force per velocity from the first-order velocity correction of rho."""
    F = force_operator(liou, dg_modes)
    # dH/dz = -F, so dL/dz rho = i[F, rho]
    dL_rho0 = 1j * (F @ rho0 - rho0 @ F)
    drho0 = solve_traceless(liou, -dL_rho0)
    rho1 = solve_traceless(liou, drho0)
    return float(expect(F, rho1).real)


def oracle_diffusion(liou, rho0, dg_modes):
    """Zero-frequency spectral density of the force fluctuations."""
    F = force_operator(liou, dg_modes)
    f = expect(F, rho0)
    y = solve_traceless(liou, -(F @ rho0 - f * rho0))
    return float(2.0 * expect(F, y).real)


@dataclass
class OracleResult:
    force: float
    friction: float
    diffusion: float
    excitation: float
    photons: np.ndarray


def oracle_coefficients(params, g_modes, dg_modes, config: HilbertConfig | None = None):
    g_modes = np.atleast_1d(np.asarray(g_modes, dtype=float))
    config = config or HilbertConfig(n_modes=len(g_modes))
    liou = build_liouvillian(params, g_modes, config)
    rho = steady_density(liou)
    exc = float(expect(liou.sigma.conj().T @ liou.sigma, rho).real)
    photons = np.array([expect(a.conj().T @ a, rho).real for a in liou.modes])
    return OracleResult(force=oracle_force(liou, rho, dg_modes),
                        friction=oracle_friction(liou, rho, dg_modes),
                        diffusion=oracle_diffusion(liou, rho, dg_modes),
                        excitation=exc, photons=photons)


def standing_wave(g, kz):
    """Coupling and gradient of a single cos(kz) mode (k = 1)."""
    return np.array([g * math.cos(kz)]), np.array([-g * math.sin(kz)])


def relative_deviation(a, b):
    denom = max(abs(a), abs(b))
    return 0.0 if denom == 0 else abs(a - b) / denom


@dataclass
class SwapReport:
    beta_cavity_oracle: float
    beta_swapped_closed: float
    beta_atom_oracle: float
    beta_atom_closed: float
    deviation: float          # cavity oracle vs swapped closed form
    pump_difference: float    # atom vs cavity drive at identical parameters


def swap_symmetry_check(params, g_modes, dg_modes, n_max=4) -> SwapReport:
    """Compare the cavity-driven oracle with the closed form at exchanged
    (delta_a, gamma) <-> (delta_c, kappa)."""
    g_modes = np.atleast_1d(g_modes)
    sums = CouplingSums.from_modes(g_modes, np.atleast_1d(dg_modes))
    cav = oracle_coefficients(params, g_modes, dg_modes,
                              HilbertConfig(len(g_modes), n_max, "cavity"))
    atom = oracle_coefficients(params, g_modes, dg_modes,
                               HilbertConfig(len(g_modes), n_max, "atom"))
    swapped = float(linres.friction(params.swapped(), sums))
    return SwapReport(
        beta_cavity_oracle=cav.friction, beta_swapped_closed=swapped,
        beta_atom_oracle=atom.friction,
        beta_atom_closed=float(linres.friction(params, sums)),
        deviation=relative_deviation(cav.friction, swapped),
        pump_difference=relative_deviation(atom.friction, cav.friction))


def linearization_ratio(params, g_modes, dg_modes, quantity="friction", n_max=4):
    """deviation(2 eta) / deviation(eta) between oracle and closed form.

    A ratio near 4 shows that the disagreement is the O(eta^2) saturation
    correction of the full two-level atom.
    """
    sums = CouplingSums.from_modes(np.atleast_1d(g_modes), np.atleast_1d(dg_modes))
    closed = {"friction": linres.friction, "diffusion": linres.diffusion_dipole}[quantity]
    devs = []
    for p in (params, params.replace(eta=2.0 * params.eta)):
        res = oracle_coefficients(p, g_modes, dg_modes, HilbertConfig(len(np.atleast_1d(g_modes)), n_max))
        devs.append(relative_deviation(getattr(res, quantity), float(closed(p, sums))))
    return devs[1] / devs[0] if devs[0] > 0 else math.inf, devs

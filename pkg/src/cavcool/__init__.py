"""Cavity cooling of a laser-driven atom in a degenerate multimode resonator.

Closed-form friction and diffusion coefficients, wavelength-averaged
thermodynamics, a master-equation verification oracle and a stochastic
centre-of-mass simulator. Natural units: hbar = gamma = k = 1.
"""
from ._kernels import BACKEND, available_backends
from .modes import CouplingSums, ModeSet, coupling_sums, effective_coupling
from .params import SystemParams, validate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CouplingSums",
    "ModeSet",
    "SystemParams",
    "available_backends",
    "coupling_sums",
    "effective_coupling",
    "validate",
]

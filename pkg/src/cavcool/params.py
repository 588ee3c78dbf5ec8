"""Unit system, the master parameter record and ``key = value`` config parsing.

Natural units are used throughout: hbar = 1, gamma = 1 (the atomic dipole
decay rate, i.e. half the spontaneous emission rate) and k = 1. Lengths are
in 1/k, momenta in hbar*k, rates in gamma, energies and temperatures in
hbar*gamma. The atomic mass enters only through ``recoil_freq``:

    m = hbar k^2 / (2 * recoil_freq)  ->  m = 1 / (2 * recoil_freq)
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

DEFAULT_SATURATION_THRESHOLD = 0.1


def rb87_recoil_ratio() -> float:
    """Recoil frequency hbar k^2 / 2m of 87Rb on the D2 line over gamma = Gamma/2."""
    from scipy import constants as c

    wavelength = 780.241209686e-9
    mass = 86.909180527 * c.atomic_mass
    gamma = math.pi * 6.0666e6       # Gamma/2 with Gamma = 2 pi * 6.0666 MHz
    k = 2.0 * math.pi / wavelength
    return c.hbar * k**2 / (2.0 * mass) / gamma


RB87_RECOIL_RATIO = rb87_recoil_ratio()


class ParameterError(ValueError):
    """Raised when a parameter record violates one or more invariants."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SaturationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SystemParams:
    gamma: float = 1.0
    kappa: float = 1.0
    delta_a: float = -3.0
    delta_c: float = -3.0
    eta: float = 0.01
    g_single: float = 3.0
    recoil_freq: float = RB87_RECOIL_RATIO
    u2bar: float = 0.4
    k_atom_ratio: float = 1.0

    @property
    def mass(self) -> float:
        """Atomic mass in units hbar k^2 / gamma."""
        return 1.0 / (2.0 * self.recoil_freq)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def swapped(self) -> "SystemParams":
        """Exchange (delta_a, gamma) <-> (delta_c, kappa)."""
        return dataclasses.replace(
            self, gamma=self.kappa, kappa=self.gamma,
            delta_a=self.delta_c, delta_c=self.delta_a)


def validate(params: SystemParams) -> SystemParams:
    problems = []
    for f in fields(params):
        value = getattr(params, f.name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            problems.append(f"{f.name} must be a finite number")
    if problems:
        raise ParameterError(problems)
    if not params.gamma > 0:
        problems.append("gamma must be positive")
    if not params.kappa > 0:
        problems.append("kappa must be positive")
    if not params.eta >= 0:
        problems.append("eta must be non-negative")
    if not params.g_single >= 0:
        problems.append("g_single must be non-negative")
    if not params.recoil_freq > 0:
        problems.append("recoil_freq must be positive")
    if not 0 < params.u2bar <= 1:
        problems.append("u2bar must lie in (0,1]")
    if not params.k_atom_ratio > 0:
        problems.append("k_atom_ratio must be positive")
    if problems:
        raise ParameterError(problems)
    return params


def saturation_guard(params, excitation: float,
                     threshold: float = DEFAULT_SATURATION_THRESHOLD) -> bool:
    """Return True if ``excitation`` is within the low-saturation regime.

    Above ``threshold`` a :class:`SaturationWarning` is emitted and False is
    returned; the linear-response results are then only indicative.
    """
    if excitation < 0:
        raise ValueError("excitation must be non-negative")
    if excitation <= threshold:
        return True
    warnings.warn(
        f"atomic excitation {excitation:.3g} exceeds the low-saturation "
        f"threshold {threshold:g} (eta={params.eta:g})",
        SaturationWarning, stacklevel=2)
    return False


def parse_value(text: str):
    """Parse a config value: bool, int, float, or bare string."""
    low = text.strip().lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text.strip()


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Section headers such as ``[simulate]`` prefix the following keys with
    ``simulate.``. Returns a flat dict; no key validation is done here.
    """
    out = {}
    prefix = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            prefix = f"{name}." if name else ""
            continue
        if "=" not in line:
            raise ParameterError([f"{source}:{lineno}: expected 'key = value', got {raw!r}"])
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParameterError([f"{source}:{lineno}: empty key"])
        out[prefix + key] = parse_value(value)
    return out


def read_config(path) -> dict:
    path = Path(path)
    return parse_config_text(path.read_text(), source=str(path))


PARAM_KEYS = tuple(f.name for f in fields(SystemParams))


def params_from_mapping(mapping: dict, base: SystemParams | None = None) -> SystemParams:
    """Build a validated record from ``mapping``; unknown keys are an error."""
    unknown = sorted(set(mapping) - set(PARAM_KEYS))
    if unknown:
        raise ParameterError([f"unknown parameter key {k!r}" for k in unknown])
    values = {k: float(v) for k, v in mapping.items()}
    base = base or SystemParams()
    return validate(dataclasses.replace(base, **values))

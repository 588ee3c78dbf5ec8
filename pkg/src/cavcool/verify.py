"""Closed forms versus the master-equation oracle: the ``verify`` table."""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import linres
from .modes import CouplingSums
from .oracle import (HilbertConfig, oracle_coefficients, relative_deviation,
                     standing_wave, swap_symmetry_check)
from .params import SystemParams

FRICTION_RTOL = 1e-3
DIFFUSION_RTOL = 1e-2
FORCE_RTOL = 1e-3
SWAP_RTOL = 1e-3
PUMP_MIN_DIFFERENCE = 0.05
CUTOFF_RTOL = 1e-6


@dataclass
class Check:
    name: str
    value: float
    reference: float
    deviation: float
    tolerance: float
    passed: bool
    kind: str = "max"    # "max": deviation <= tol; "min": deviation > tol

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        op = "<=" if self.kind == "max" else ">"
        return (f"{flag}  {self.name:<44s} value={self.value: .6e} ref={self.reference: .6e} "
                f"dev={self.deviation:.2e} {op} {self.tolerance:.0e}")


def _check(name, value, reference, tol, kind="max"):
    dev = relative_deviation(value, reference)
    ok = dev <= tol if kind == "max" else dev > tol
    return Check(name, value, reference, dev, tol, ok, kind)


def _zero_check(name, value, atol=1e-12):
    return Check(name, value, 0.0, abs(value), atol, abs(value) <= atol)


def compare_point(params, kz, label, n_max=4):
    """Friction, diffusion, force and excitation at one single-mode point."""
    g, dg = standing_wave(params.g_single, kz)
    sums = CouplingSums.from_modes(g, dg)
    res = oracle_coefficients(params, g, dg, HilbertConfig(1, n_max))
    return [
        _check(f"{label} friction", res.friction, float(linres.friction(params, sums)),
               FRICTION_RTOL),
        _check(f"{label} diffusion", res.diffusion,
               float(linres.diffusion_dipole(params, sums)), DIFFUSION_RTOL),
        _check(f"{label} mean force", res.force,
               float(linres.mean_force_closed(params, sums)), FORCE_RTOL),
        _check(f"{label} excitation", res.excitation, float(linres.excitation(params, sums)),
               FRICTION_RTOL),
    ]


def verification_suite(params: SystemParams | None = None, kz=math.pi / 4):
    """Run the oracle checks; returns a list of :class:`Check`."""
    base = params or SystemParams(kappa=1.0, g_single=3.0, delta_a=-3.0, delta_c=-3.0,
                                  eta=0.01)
    checks = compare_point(base, kz, "headline")
    checks += compare_point(base.replace(delta_a=2.0, delta_c=-1.0), kz, "generic")
    checks += compare_point(base.replace(kappa=10.0, g_single=0.5, delta_a=-5.0,
                                         delta_c=-5.0), kz, "bad cavity")

    swap_p = base.replace(kappa=0.1, g_single=0.3, delta_a=-5.0, delta_c=-0.5)
    g, dg = standing_wave(swap_p.g_single, kz)
    rep = swap_symmetry_check(swap_p, g, dg)
    checks.append(_check("swap: cavity-pumped oracle vs swapped closed form",
                         rep.beta_cavity_oracle, rep.beta_swapped_closed, SWAP_RTOL))
    checks.append(_check("swap: atom vs cavity drive differ",
                         rep.beta_atom_oracle, rep.beta_cavity_oracle,
                         PUMP_MIN_DIFFERENCE, kind="min"))

    g, dg = standing_wave(base.g_single, kz)
    r3 = oracle_coefficients(base, g, dg, HilbertConfig(1, 3))
    r4 = oracle_coefficients(base, g, dg, HilbertConfig(1, 4))
    for name in ("friction", "diffusion", "force"):
        checks.append(_check(f"cutoff n_max 3 -> 4: {name}", getattr(r3, name),
                             getattr(r4, name), CUTOFF_RTOL))

    dark = oracle_coefficients(base.replace(eta=0.0), g, dg, HilbertConfig(1, 4))
    checks.append(_zero_check("eta = 0: friction", dark.friction))
    checks.append(_zero_check("eta = 0: diffusion", dark.diffusion))
    checks.append(_zero_check("eta = 0: excitation", dark.excitation))
    return checks


def format_table(checks):
    lines = [c.line() for c in checks]
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines)

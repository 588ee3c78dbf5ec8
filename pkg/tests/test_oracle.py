import math
import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from cavcool import linres
from cavcool.modes import CouplingSums
from cavcool.oracle import (CutoffWarning, HilbertConfig, build_liouvillian, force_operator,
                            linearization_ratio, oracle_coefficients, oracle_diffusion,
                            relative_deviation, standing_wave, steady_density,
                            swap_symmetry_check)
from cavcool.params import SystemParams

HEADLINE = SystemParams(kappa=1.0, g_single=3.0, delta_a=-3.0, delta_c=-3.0, eta=0.01)


def test_hilbert_config_limits():
    assert HilbertConfig(1, 4).dim == 10
    assert HilbertConfig(2, 3).dim == 32
    with pytest.raises(ValueError):
        HilbertConfig(3, 1)
    with pytest.raises(ValueError):
        HilbertConfig(2, 5)          # 72 > 64
    with pytest.raises(ValueError):
        HilbertConfig(1, 2, "mirror")


def test_liouvillian_preserves_trace():
    g, _ = standing_wave(3.0, 0.3)
    L = build_liouvillian(HEADLINE.replace(eta=0.5), g, HilbertConfig(1, 3))
    t = L.trace_vector()
    assert np.max(np.abs(t @ L.matrix)) < 1e-12


def test_steady_state_matches_long_time_propagation():
    g, _ = standing_wave(1.0, 0.5)
    p = HEADLINE.replace(eta=0.3, g_single=1.0)
    L = build_liouvillian(p, g, HilbertConfig(1, 3))
    rho = steady_density(L)
    rho_init = np.zeros((L.dim, L.dim), complex)
    rho_init[0, 0] = 1.0
    sol = solve_ivp(lambda t, y: L.matrix @ y, (0.0, 60.0), rho_init.reshape(-1),
                    rtol=1e-10, atol=1e-12)
    rho_t = sol.y[:, -1].reshape(L.dim, L.dim)
    assert np.max(np.abs(rho_t - rho)) < 1e-8
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)


def test_undriven_atom_stays_dark():
    g, dg = standing_wave(3.0, math.pi / 4)
    res = oracle_coefficients(HEADLINE.replace(eta=0.0), g, dg, HilbertConfig(1, 3))
    assert res.force == res.friction == 0.0
    assert abs(res.diffusion) < 1e-14
    assert abs(res.excitation) < 1e-14


@pytest.mark.parametrize("eta,da", [(0.1, 0.0), (0.5, -2.0), (2.0, 1.0)])
def test_free_space_excitation_including_saturation(eta, da):
    p = SystemParams(delta_a=da, eta=eta)
    res = oracle_coefficients(p, [0.0], [0.0], HilbertConfig(1, 1))
    # two-level atom, Rabi frequency 2 eta, population decay 2 gamma
    assert res.excitation == pytest.approx(eta**2 / (1.0 + da**2 + 2 * eta**2), rel=1e-10)


def test_diffusion_equals_integrated_force_correlation():
    p = HEADLINE.replace(eta=0.2, kappa=0.7, delta_a=-1.0, delta_c=-2.0, g_single=1.2)
    g, dg = standing_wave(p.g_single, 0.9)
    L = build_liouvillian(p, g, HilbertConfig(1, 3))
    rho0 = steady_density(L)
    F = force_operator(L, dg)
    f = np.trace(F @ rho0)
    y0 = (F @ rho0 - f * rho0).reshape(-1)
    n2 = y0.size
    Fv = F.T.reshape(-1)                       # Tr(F y) = Fv . vec(y)

    def rhs(t, u):
        y = u[:n2]
        return np.concatenate([L.matrix @ y, [Fv @ y]])

    sol = solve_ivp(rhs, (0.0, 200.0), np.concatenate([y0, [0.0]]), rtol=1e-10, atol=1e-14)
    integral = sol.y[-1, -1]
    assert oracle_diffusion(L, rho0, dg) == pytest.approx(2.0 * integral.real, rel=1e-6)


def test_headline_point_agrees_with_closed_forms():
    g, dg = standing_wave(3.0, math.pi / 4)
    s = CouplingSums.from_modes(g, dg)
    res = oracle_coefficients(HEADLINE, g, dg, HilbertConfig(1, 4))
    assert relative_deviation(res.friction, float(linres.friction(HEADLINE, s))) < 1e-3
    assert relative_deviation(res.diffusion, float(linres.diffusion_dipole(HEADLINE, s))) < 1e-2
    assert relative_deviation(res.force, float(linres.mean_force_closed(HEADLINE, s))) < 1e-3


def test_disagreement_is_a_saturation_effect():
    p = SystemParams(kappa=0.1, g_single=3.0, delta_a=-3.1, delta_c=5.0, eta=0.01)
    g, dg = standing_wave(3.0, math.pi / 4)
    ratio, devs = linearization_ratio(p, g, dg)
    assert devs[0] > 1e-3
    assert 3.5 < ratio < 4.5


def test_cutoff_warning():
    p = SystemParams(kappa=0.1, g_single=0.5, delta_a=-1.0, delta_c=0.0, eta=0.3)
    g, dg = standing_wave(0.5, 0.2)
    with pytest.warns(CutoffWarning):
        oracle_coefficients(p, g, dg, HilbertConfig(1, 2, "cavity"))


def test_cutoff_converged_at_low_drive():
    g, dg = standing_wave(3.0, math.pi / 4)
    with warnings.catch_warnings():
        warnings.simplefilter("error", CutoffWarning)
        r3 = oracle_coefficients(HEADLINE, g, dg, HilbertConfig(1, 3))
        r4 = oracle_coefficients(HEADLINE, g, dg, HilbertConfig(1, 4))
    for name in ("force", "friction", "diffusion"):
        assert relative_deviation(getattr(r3, name), getattr(r4, name)) < 1e-6


def test_two_modes_agree_with_multimode_closed_forms():
    p = SystemParams(kappa=1.0, g_single=1.0, delta_a=-2.0, delta_c=-1.5, eta=0.01)
    g = np.array([1.1, -0.6])
    dg = np.array([0.4, 0.9])
    s = CouplingSums.from_modes(g, dg)
    res = oracle_coefficients(p, g, dg, HilbertConfig(2, 3))
    assert relative_deviation(res.friction, float(linres.friction(p, s))) < 1e-3
    assert relative_deviation(res.diffusion, float(linres.diffusion_dipole(p, s))) < 1e-2
    assert relative_deviation(res.excitation, float(linres.excitation(p, s))) < 1e-3
    state = linres.steady_state_from_modes(p, g, dg)
    assert res.photons == pytest.approx(linres.photon_numbers(state), rel=1e-3)


def test_swap_symmetry_and_pump_dependence():
    p = SystemParams(kappa=0.1, g_single=0.3, delta_a=-5.0, delta_c=-0.5, eta=0.01)
    g, dg = standing_wave(0.3, math.pi / 4)
    rep = swap_symmetry_check(p, g, dg)
    assert rep.deviation < 1e-3
    assert rep.pump_difference > 0.05

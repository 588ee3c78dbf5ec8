import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavcool.modes import (CouplingSums, ModeSet, coupling_sums, effective_coupling,
                           enhancement_factor, envelope_coupling, local_coupling,
                           mode_amplitude, mode_gradient, onaxis_weight, onaxis_weights,
                           resonant_detunings)


def exact_weight(n):
    w = Fraction(1)
    for j in range(1, n + 1):
        w *= Fraction(2 * j - 1, 2 * j)
    return w


def exact_enhancement(N):
    # (2N+1)!! / (2N)!!
    num = math.prod(range(1, 2 * N + 2, 2))
    den = math.prod(range(2, 2 * N + 1, 2)) if N else 1
    return Fraction(num, den)


@pytest.mark.parametrize("N", range(11))
def test_weight_sum_identity_exact(N):
    assert sum(exact_weight(n) for n in range(N + 1)) == exact_enhancement(N)
    assert onaxis_weight(N) == pytest.approx(float(exact_weight(N)), rel=1e-15)


def test_weight_sum_identity_float_to_128():
    for N in range(129):
        lgamma_form = math.exp(math.lgamma(2 * N + 2) - N * math.log(4.0)
                               - 2.0 * math.lgamma(N + 1))
        assert np.sum(onaxis_weights(N)) == pytest.approx(enhancement_factor(N), rel=1e-12)
        assert enhancement_factor(N) == pytest.approx(lgamma_form, rel=1e-12)


def test_effective_coupling_examples():
    assert effective_coupling(0, 1.0) == 1.0
    assert effective_coupling(1, 1.0) == 1.5
    v = effective_coupling(64, 0.3)
    assert math.isfinite(v)
    assert v / 0.3 == pytest.approx(9.07, rel=2e-3)
    with pytest.raises(ValueError):
        effective_coupling(2, -1.0)


def test_mode_amplitude_examples():
    ms = ModeSet(n_index_max=2, g_single=2.0, gouy_scale=100.0, envelope_on=True)
    assert mode_amplitude(ms, 0, 0, 0.0) == pytest.approx(2.0)
    z0 = ms.gouy_scale
    assert mode_amplitude(ms, 0, 0, z0) == pytest.approx(2.0 * math.cos(z0 - math.pi / 4)
                                                         / math.sqrt(2.0))
    # first axial node of mode (1, 2): phase z - 7 atan(z/z0) = pi/2
    from scipy.optimize import brentq
    zn = brentq(lambda z: z - 7 * math.atan(z / z0) - math.pi / 2, 0.0, 3.0)
    assert abs(mode_amplitude(ms, 1, 2, zn)) < 1e-12
    with pytest.raises(ValueError):
        mode_amplitude(ms, 3, 0, 0.0)


def test_mode_gradient_examples():
    ms = ModeSet(n_index_max=4, g_single=1.5, gouy_scale=2000.0)
    assert mode_gradient(ms, 0, 0, 0.0) == pytest.approx(0.0, abs=1e-15)
    z = 0.7
    ref = -1.5 * math.sin(z)
    assert mode_gradient(ms, 0, 0, z) == pytest.approx(ref, rel=5.0 / ms.gouy_scale)


@pytest.mark.parametrize("n,m", [(0, 0), (1, 3), (4, 4), (2, 0)])
def test_mode_gradient_matches_finite_difference(n, m):
    ms = ModeSet(n_index_max=4, g_single=1.0, gouy_scale=50.0)
    z = 0.3 * ms.gouy_scale
    h = 1e-4
    fd = (mode_amplitude(ms, n, m, z + h) - mode_amplitude(ms, n, m, z - h)) / (2 * h)
    exact = mode_gradient(ms, n, m, z)
    assert fd == pytest.approx(exact, rel=1e-6)


def brute_force_sums(ms, z):
    g = np.array([mode_amplitude(ms, n, m, z) for n, m in ms.indices()])
    dg = np.array([mode_gradient(ms, n, m, z) for n, m in ms.indices()])
    return CouplingSums.from_modes(g, dg)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(0, 6), z=st.floats(-300.0, 300.0), env=st.booleans())
def test_grouped_sums_equal_mode_by_mode_sums(N, z, env):
    ms = ModeSet(n_index_max=N, g_single=0.7, gouy_scale=120.0, envelope_on=env)
    fast, slow = coupling_sums(ms, z), brute_force_sums(ms, z)
    for name in ("G", "dG_dz", "sum_dg_sq"):
        assert getattr(fast, name) == pytest.approx(getattr(slow, name), rel=1e-10, abs=1e-12)
    assert fast.Gamma.real == pytest.approx(slow.Gamma.real, rel=1e-10, abs=1e-12)


def test_coupling_sums_examples():
    s = coupling_sums(ModeSet(0, 2.0), 0.0)
    assert (s.G, s.Gamma, s.dG_dz, s.sum_dg_sq) == (pytest.approx(4.0), 0, 0, 0)
    s = coupling_sums(ModeSet(0, 2.0, math.inf, False), math.pi / 4)
    assert s.G == pytest.approx(2.0)
    assert s.sum_dg_sq == pytest.approx(2.0)
    assert s.dG_dz == pytest.approx(-4.0)


@pytest.mark.parametrize("N", [0, 1, 3, 8, 32, 128])
def test_waist_reduces_to_effective_mode(N):
    ms = ModeSet(N, 0.3, envelope_on=False)
    s = coupling_sums(ms, 0.0)
    assert s.G == pytest.approx(effective_coupling(N, 0.3) ** 2, rel=1e-12)
    assert s.Gamma == 0


@settings(max_examples=30, deadline=None)
@given(N=st.integers(0, 16), z=st.floats(-2000.0, 2000.0))
def test_dG_dz_matches_finite_difference_of_G(N, z):
    ms = ModeSet(N, 1.0, gouy_scale=500.0)
    h = 1e-5
    fd = (coupling_sums(ms, z + h).G - coupling_sums(ms, z - h).G) / (2 * h)
    exact = coupling_sums(ms, z).dG_dz
    scale = max(abs(exact), 1e-3 * coupling_sums(ms, z).G)
    assert abs(fd - exact) <= 1e-5 * scale


def test_coupling_sums_vectorized():
    ms = ModeSet(3, 1.0, gouy_scale=80.0)
    z = np.linspace(-5, 5, 7)
    s = coupling_sums(ms, z)
    assert s.G.shape == (7,)
    for i, zi in enumerate(z):
        assert s.G[i] == pytest.approx(coupling_sums(ms, zi).G, rel=1e-14)


def test_local_coupling_examples():
    ms0 = ModeSet(0, 2.5, envelope_on=False)
    assert local_coupling(ms0, 1.234) == pytest.approx(2.5, rel=1e-9)
    ms = ModeSet(8, 1.0)
    assert local_coupling(ms, 0.0) == pytest.approx(ms.g_eff, rel=1e-6)
    z0 = ms.gouy_scale
    assert local_coupling(ms, z0) < envelope_coupling(ms, z0)
    with pytest.raises(ValueError):
        local_coupling(ms, 0.0, n_grid=16)


def test_envelope_coupling():
    ms = ModeSet(4, 1.0, gouy_scale=10.0)
    assert envelope_coupling(ms, 10.0) == pytest.approx(ms.g_eff / math.sqrt(2.0))


def test_resonant_detunings():
    assert resonant_detunings(0.0, -50.0) == (-50.0, 0.0)
    da, dc = resonant_detunings(3.0, -50.0)
    assert da * dc == pytest.approx(9.0, rel=1e-14)
    assert da - dc == pytest.approx(-50.0, rel=1e-15)
    assert da < dc < 0
    # negative root of x^2 - 50 x - 9 = 0 for delta_c
    assert dc == pytest.approx((50.0 - math.sqrt(2500.0 + 36.0)) / 2.0, rel=1e-12)
    with pytest.raises(ValueError):
        resonant_detunings(1.0, 0.0)
    with pytest.raises(ValueError):
        resonant_detunings(-1.0, -5.0)


@given(g=st.floats(0.0, 1e3), d=st.floats(1e-3, 1e3))
def test_resonant_detunings_constraints(g, d):
    da, dc = resonant_detunings(g, -d)
    assert da * dc == pytest.approx(g * g, rel=1e-10, abs=1e-300)
    assert da - dc == pytest.approx(-d, rel=1e-10)
    assert da <= 0 and dc <= 0

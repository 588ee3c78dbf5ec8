import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavcool import linres
from cavcool.modes import CouplingSums, ModeSet, coupling_sums
from cavcool.params import SystemParams


def linear_amplitudes(p, g, dg):
    """Direct solve of the linearized amplitude equations.

    x = (s, a_1..a_M) obeys dx/dt = A(z) x + b with b = (eta, 0, ...). For an
    atom moving at velocity v, x = x0 + v x1 with A x0 = -b and A x1 = d_z x0.
    """
    M = len(g)
    A = np.zeros((M + 1, M + 1), complex)
    dA = np.zeros_like(A)
    A[0, 0] = -(p.gamma - 1j * p.delta_a)
    A[0, 1:] = -g
    A[1:, 0] = g
    A[1:, 1:] = -(p.kappa - 1j * p.delta_c) * np.eye(M)
    dA[0, 1:] = -dg
    dA[1:, 0] = dg
    b = np.zeros(M + 1, complex)
    b[0] = p.eta
    x0 = np.linalg.solve(A, -b)
    dx0 = np.linalg.solve(A, -dA @ x0)
    x1 = np.linalg.solve(A, dx0)
    return x0, x1


params_st = st.builds(
    SystemParams,
    kappa=st.floats(0.05, 20.0), delta_a=st.floats(-10.0, 10.0),
    delta_c=st.floats(-10.0, 10.0), eta=st.floats(1e-3, 1.0))


@settings(max_examples=60, deadline=None)
@given(p=params_st, M=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_amplitudes_match_direct_solve(p, M, seed):
    rng = np.random.default_rng(seed)
    g = rng.uniform(-3, 3, M)
    dg = rng.uniform(-3, 3, M)
    x0, x1 = linear_amplitudes(p, g, dg)
    st_ = linres.steady_state_from_modes(p, g, dg)
    scale0 = np.max(np.abs(x0))
    scale1 = np.max(np.abs(x1))
    assert abs(st_.s0 - x0[0]) <= 1e-10 * scale0
    assert np.max(np.abs(st_.alphas - x0[1:])) <= 1e-10 * scale0
    assert abs(st_.s1 - x1[0]) <= 1e-9 * scale1
    assert np.max(np.abs(st_.alphas1 - x1[1:])) <= 1e-9 * scale1


@settings(max_examples=60, deadline=None)
@given(p=params_st, M=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_closed_forms_equal_amplitude_expressions(p, M, seed):
    rng = np.random.default_rng(seed)
    g = rng.uniform(-3, 3, M)
    dg = rng.uniform(-3, 3, M)
    state = linres.steady_state_from_modes(p, g, dg)
    sums = CouplingSums.from_modes(g, dg)
    f_state, f_closed = linres.mean_force(state), float(linres.mean_force_closed(p, sums))
    assert f_state == pytest.approx(f_closed, rel=1e-9, abs=1e-14 * p.eta**2)
    b_state, b_closed = linres.friction_from_state(state), float(linres.friction(p, sums))
    assert b_state == pytest.approx(b_closed, rel=1e-8, abs=1e-13 * p.eta**2)
    assert linres.atomic_excitation(state) == pytest.approx(
        float(linres.excitation(p, sums)), rel=1e-10)


def test_determinant_examples():
    p = SystemParams(kappa=1.0, delta_a=0.0, delta_c=0.0)
    s = CouplingSums.from_modes([0.0], [0.0])
    assert linres.determinant(p, s) == pytest.approx(1.0)
    s = CouplingSums.from_modes([3.0], [0.0])
    assert linres.determinant(p, s) == pytest.approx(10.0)
    p = SystemParams(kappa=1.0, delta_a=-3.0, delta_c=-3.0)
    d = linres.determinant(p, s)
    assert d == pytest.approx((1 + 3j) ** 2 + 9)
    assert abs(d) ** 2 == pytest.approx(linres.det_abs2_terms(1.0, 1.0, -3.0, -3.0, 9.0))


def test_singular_determinant():
    # D = (kappa - i delta_c)(gamma - i delta_a) + G never vanishes for kappa, gamma > 0;
    # an unvalidated record with kappa = delta_c = G = 0 makes it singular
    p = SystemParams(kappa=0.0, delta_c=0.0)
    with pytest.raises(linres.SingularDeterminant):
        linres.steady_state_from_modes(p, [0.0], [1.0])


@settings(max_examples=200, deadline=None)
@given(kappa=st.floats(0.05, 20), da=st.floats(-10, 10), dc=st.floats(-10, 10),
       g=st.floats(0, 5), kz=st.floats(0, 2 * math.pi))
def test_friction_is_odd_in_detunings(kappa, da, dc, g, kz):
    s = coupling_sums(ModeSet(0, g, math.inf, False), kz)
    b = linres.friction_terms(kappa, 1.0, da, dc, 0.1, s.G, s.dG_dz, s.sum_dg_sq)
    bm = linres.friction_terms(kappa, 1.0, -da, -dc, 0.1, s.G, s.dG_dz, s.sum_dg_sq)
    assert abs(b + bm) <= 1e-10 * max(abs(b), 1e-300)


@settings(max_examples=50, deadline=None)
@given(p=params_st, kz=st.floats(0, 2 * math.pi))
def test_coefficients_scale_as_eta_squared(p, kz):
    s = coupling_sums(ModeSet(0, 2.0, math.inf, False), kz)
    q = p.replace(eta=2.0 * p.eta)
    for func in (linres.friction, linres.diffusion_dipole, linres.excitation,
                 linres.mean_force_closed):
        a, b = float(func(p, s)), float(func(q, s))
        assert b == pytest.approx(4.0 * a, rel=1e-12, abs=1e-300)


def test_eta_zero_gives_zero():
    p = SystemParams(eta=0.0)
    mc = linres.motion_coefficients(p, ModeSet(2, 1.0), 0.7)
    assert mc.f_p == mc.beta == mc.d_dip == mc.d_rec == mc.excitation == 0.0
    assert np.all(mc.photons == 0.0)


@pytest.mark.parametrize("da", [-4.0, 0.0, 2.5])
def test_free_space_limit(da):
    p = SystemParams(kappa=1.0, delta_a=da, delta_c=-1.0, eta=0.05, u2bar=0.4)
    free = p.eta**2 / (p.gamma**2 + da**2)
    prev = None
    for g in (1e-2, 1e-3, 1e-4, 1e-5, 0.0):
        mc = linres.motion_coefficients(p, ModeSet(0, g, math.inf, False), 0.4)
        err = abs(mc.excitation - free)
        assert mc.d_rec == pytest.approx(2 * 0.4 * mc.excitation, rel=1e-14)
        if prev is not None:
            assert err <= prev + 1e-18
        prev = err
    assert mc.excitation == pytest.approx(free, rel=1e-14)
    assert mc.beta == 0.0 and mc.d_dip == 0.0


def test_diffusion_recoil_from_state():
    p = SystemParams(u2bar=0.25, k_atom_ratio=2.0)
    state = linres.steady_state_from_modes(p, [1.0], [0.5])
    assert linres.diffusion_recoil(p, state) == pytest.approx(
        2 * 4.0 * 0.25 * linres.atomic_excitation(state))


def test_headline_point_cools():
    p = SystemParams(kappa=1.0, g_single=3.0, delta_a=-3.0, delta_c=-3.0, eta=0.01)
    mc = linres.motion_coefficients(p, ModeSet(0, 3.0, math.inf, False), math.pi / 4)
    assert mc.beta < 0
    assert mc.d_dip > 0
    assert mc.d_total == mc.d_dip + mc.d_rec

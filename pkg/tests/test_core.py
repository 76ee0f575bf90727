"""Tests for the shared types: drives, bases, mixing coefficients."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from lzsm.core import (
    AmplitudePair,
    Basis,
    DissipationParams,
    Drive,
    NonDifferentiableDrive,
    NonPeriodicDrive,
    TlsParams,
    adiabatic_levels,
    drive_derivative,
    drive_period,
    drive_phase_integral,
    drive_sample,
    mixing_coefficients,
    rotate_basis,
    rotation_matrix,
)


def test_params_validation():
    with pytest.raises(ValueError):
        TlsParams(delta=0.0)
    with pytest.raises(ValueError):
        TlsParams(delta=-1.0)
    with pytest.raises(ValueError):
        TlsParams(delta=math.nan)
    with pytest.raises(ValueError):
        TlsParams(delta=1.0, eps0=math.inf)
    p = TlsParams(delta=2.0, eps0=-3.0)
    assert p.delta == 2.0 and p.eps0 == -3.0


def test_adiabatic_levels_values():
    p = TlsParams(delta=3.0)
    lo, hi = adiabatic_levels(p, 4.0)
    assert_allclose(hi, 2.5)  # sqrt(9 + 16) / 2
    assert_allclose(lo, -hi)
    lo_arr, hi_arr = adiabatic_levels(p, np.array([0.0, 4.0]))
    assert_allclose(hi_arr, [1.5, 2.5])


def test_mixing_identities():
    p = TlsParams(delta=1.3)
    for eps in (-7.0, -0.2, 0.0, 0.9, 12.0):
        gp, gm = mixing_coefficients(p, eps)
        de = math.hypot(p.delta, eps)
        assert_allclose(gp * gp + gm * gm, 1.0, atol=1e-14)
        assert_allclose(gp * gm, p.delta / (2.0 * de), atol=1e-14)
        theta = math.atan2(p.delta, eps)
        assert_allclose(gp, math.cos(0.5 * theta), atol=1e-14)
        assert_allclose(gm, math.sin(0.5 * theta), atol=1e-14)


def test_mixing_limits():
    p = TlsParams(delta=1.0)
    gp, gm = mixing_coefficients(p, 1e8)
    assert gp == pytest.approx(1.0, abs=1e-9)
    gp, gm = mixing_coefficients(p, -1e8)
    assert gm == pytest.approx(1.0, abs=1e-9)
    gp, gm = mixing_coefficients(p, 0.0)
    assert gp == pytest.approx(gm)


def test_rotation_matrix_involution():
    p = TlsParams(delta=0.7)
    for eps in (-2.0, 0.0, 5.5):
        S = rotation_matrix(p, eps)
        assert_allclose(S, S.T, atol=1e-15)
        assert_allclose(S @ S, np.eye(2), atol=1e-14)


def test_rotate_basis_roundtrip():
    p = TlsParams(delta=0.7)
    s = AmplitudePair(0.6 + 0.1j, -0.3 + 0.74j, basis=Basis.DIABATIC)
    t = rotate_basis(s, p, 1.2, Basis.ADIABATIC)
    assert t.basis == Basis.ADIABATIC
    assert_allclose(t.norm(), s.norm(), atol=1e-14)
    back = rotate_basis(t, p, 1.2, Basis.DIABATIC)
    assert_allclose(back.as_array(), s.as_array(), atol=1e-14)
    # same-basis request is a no-op
    assert rotate_basis(s, p, 1.2, Basis.DIABATIC) is s
    with pytest.raises(ValueError):
        rotate_basis(s, p, 1.2, "chiral")


@given(
    st.floats(-5.0, 5.0),
    st.floats(-5.0, 5.0),
    st.floats(-5.0, 5.0),
    st.floats(-5.0, 5.0),
    st.floats(-20.0, 20.0),
)
def test_rotate_basis_preserves_norm(ar, ai, br, bi, eps):
    p = TlsParams(delta=0.9)
    s = AmplitudePair(complex(ar, ai), complex(br, bi))
    t = rotate_basis(s, p, eps, Basis.ADIABATIC)
    assert math.isclose(t.norm(), s.norm(), rel_tol=0.0, abs_tol=1e-12)


def test_drive_factory_validation():
    with pytest.raises(ValueError):
        Drive.linear(0.0)
    with pytest.raises(ValueError):
        Drive.cosine(A=-1.0, omega=1.0)
    with pytest.raises(ValueError):
        Drive.cosine(A=1.0, omega=0.0)
    with pytest.raises(ValueError):
        Drive.latching(A=1.0, omega=-2.0)
    with pytest.raises(ValueError):
        Drive.biharmonic(A1=1.0, A2=1.0, omega=1.0, ratio=0)
    with pytest.raises(ValueError):
        Drive.sampled(period=1.0, samples=[0.5])
    with pytest.raises(ValueError):
        Drive.sampled(period=-1.0, samples=[0.0, 1.0])


def test_drive_period():
    assert drive_period(Drive.cosine(1.0, 4.0)) == pytest.approx(0.5 * math.pi)
    assert drive_period(Drive.latching(1.0, 4.0)) == pytest.approx(0.5 * math.pi)
    assert drive_period(Drive.sampled(3.5, [0.0, 1.0, 0.0])) == 3.5
    with pytest.raises(NonPeriodicDrive):
        drive_period(Drive.linear(2.0))


def test_cosine_sample_convention():
    # eps_tilde(t) = -A cos(omega t - phase): starts at the minimum for
    # phase = 0 and at the maximum for phase = pi
    d = Drive.cosine(A=2.0, omega=3.0)
    assert drive_sample(d, 0.0) == pytest.approx(-2.0)
    dmax = Drive.cosine(A=2.0, omega=3.0, phase=math.pi)
    assert drive_sample(dmax, 0.0) == pytest.approx(2.0)
    ts = np.linspace(0.0, 2.0 * math.pi / 3.0, 7)
    assert_allclose(drive_sample(d, ts), -2.0 * np.cos(3.0 * ts), atol=1e-14)


def test_latching_sample_square_wave():
    d = Drive.latching(A=1.5, omega=2.0 * math.pi)  # period 1
    assert drive_sample(d, 0.0) == pytest.approx(-1.5)
    assert drive_sample(d, 0.5) == pytest.approx(1.5)
    assert drive_sample(d, 0.95) == pytest.approx(-1.5)
    vals = drive_sample(d, np.array([0.1, 0.4, 0.6]))
    assert_allclose(vals, [-1.5, 1.5, 1.5])


def test_biharmonic_sample_composition():
    d = Drive.biharmonic(A1=1.0, A2=0.5, omega=2.0, ratio=3, rel_phase=0.7)
    t = 0.83
    expect = -1.0 * math.cos(2.0 * t) - 0.5 * math.cos(6.0 * t + 0.7)
    assert drive_sample(d, t) == pytest.approx(expect, abs=1e-14)


def test_sampled_interpolation():
    d = Drive.sampled(period=4.0, samples=[0.0, 2.0, 0.0, -2.0])
    assert drive_sample(d, 0.0) == pytest.approx(0.0)
    assert drive_sample(d, 1.0) == pytest.approx(2.0)
    assert drive_sample(d, 0.5) == pytest.approx(1.0)  # halfway up the ramp
    assert drive_sample(d, 3.5) == pytest.approx(-1.0)  # wrapping back to 0
    assert drive_sample(d, 4.0 + 1.0) == pytest.approx(2.0)  # periodic


def test_drive_derivative_matches_finite_difference():
    h = 1e-6
    for d in (
        Drive.linear(1.7),
        Drive.cosine(A=1.2, omega=2.3, phase=0.4),
        Drive.biharmonic(A1=0.8, A2=0.3, omega=1.1, ratio=2, rel_phase=1.0),
    ):
        for t in (0.0, 0.37, 2.9):
            fd = (drive_sample(d, t + h) - drive_sample(d, t - h)) / (2.0 * h)
            assert drive_derivative(d, t) == pytest.approx(fd, abs=1e-7)


def test_drive_derivative_rejects_kinks():
    with pytest.raises(NonDifferentiableDrive):
        drive_derivative(Drive.latching(1.0, 1.0), 0.3)
    with pytest.raises(NonDifferentiableDrive):
        drive_derivative(Drive.sampled(1.0, [0.0, 1.0]), 0.3)


def test_phase_integral_differentiates_back():
    h = 1e-6
    for d in (
        Drive.linear(-2.2),
        Drive.cosine(A=1.2, omega=2.3, phase=0.4),
        Drive.biharmonic(A1=0.8, A2=0.3, omega=1.1, ratio=2, rel_phase=1.0),
    ):
        for t in (0.21, 1.9, 5.4):
            fd = (drive_phase_integral(d, t + h) - drive_phase_integral(d, t - h)) / (2.0 * h)
            assert fd == pytest.approx(drive_sample(d, t), abs=1e-6)
    assert drive_phase_integral(Drive.cosine(1.0, 2.0, 0.3), 0.0) == 0.0


def test_phase_integral_latching():
    d = Drive.latching(A=2.0, omega=2.0 * math.pi)  # period 1, quarter 0.25
    assert drive_phase_integral(d, 0.25) == pytest.approx(-0.5)
    assert drive_phase_integral(d, 0.75) == pytest.approx(0.5)
    assert drive_phase_integral(d, 1.0) == pytest.approx(0.0, abs=1e-14)
    assert drive_phase_integral(d, 7.25) == pytest.approx(-0.5)


def test_phase_integral_sampled_matches_quadrature():
    d = Drive.sampled(period=2.0, samples=[0.3, -1.0, 0.7, 0.1, -0.4])
    ts = np.linspace(0.0, 5.0, 2001)
    dense = drive_sample(d, ts)
    ref = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(ts) * (dense[1:] + dense[:-1]))))
    got = drive_phase_integral(d, ts)
    # the interpolant is piecewise linear, so trapezoid on a fine grid agrees
    assert_allclose(got, ref, atol=5e-5)


def test_amplitude_pair_norm():
    s = AmplitudePair(3.0 + 4.0j, 0.0)
    assert s.norm() == pytest.approx(5.0)
    assert s.as_array().dtype == complex


def test_dissipation_validation():
    DissipationParams(gamma1=1.0, gamma2=0.5)  # boundary case allowed
    with pytest.raises(ValueError):
        DissipationParams(gamma1=1.0, gamma2=0.4)
    with pytest.raises(ValueError):
        DissipationParams(gamma1=-1.0, gamma2=1.0)
    with pytest.raises(ValueError):
        DissipationParams(gamma1=0.1, gamma2=0.1, alpha_env=0.01)
    DissipationParams(gamma1=0.1, gamma2=0.1, alpha_env=0.01, temperature=0.0)

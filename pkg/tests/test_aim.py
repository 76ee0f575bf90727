"""Tests for the adiabatic-impulse period composition and its averages."""

import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar
from scipy.special import jn_zeros, jv

from lzsm.aim import (
    AimPhases,
    PeriodMatrix,
    aim_phases,
    averaged_occupation,
    crossing_adiabaticity,
    fast_passage_avg,
    n_period_occupation,
    period_matrix,
    rabi_like_frequency,
    slow_passage_avg,
)
from lzsm.core import AmplitudePair, Basis, Drive, NoCrossing, TlsParams
from lzsm.dynamics import EvolutionSpec, evolve_schrodinger
from lzsm.weber import Adiabaticity, TransferMatrix, lzsm_probability, stokes_phase

P1 = TlsParams(delta=1.0, eps0=0.0)

# adiabaticity of the validated staircase setting: single-passage probability
# exactly 0.1
DELTA_P01 = math.log(10.0) / (2.0 * math.pi)


def constructive_matrix():
    """Period matrix of the validated constructive staircase: P = 0.1,
    Phi_St = pi/2, zero offset (zeta1 = zeta2)."""
    a = Adiabaticity(DELTA_P01)
    ps = stokes_phase(a)
    ph = AimPhases.from_zetas(0.5 * math.pi - ps, 0.5 * math.pi - ps, ps)
    return period_matrix(ph, a)


# ---------------------------------------------------------------------------
# phases


def test_phases_symmetric_at_zero_offset():
    d = Drive.cosine(A=2.0, omega=0.4)
    ph = aim_phases(P1, d)
    assert ph.zeta1 == pytest.approx(ph.zeta2, rel=1e-12)
    assert ph.zeta_minus == pytest.approx(0.0, abs=1e-12)
    half = math.pi / d.omega
    assert ph.t2 - ph.t1 == pytest.approx(half, rel=1e-12)
    ps = stokes_phase(crossing_adiabaticity(P1, d))
    assert ph.phi_st == pytest.approx(ps + ph.zeta1, rel=1e-12)
    assert ph.zeta_plus == pytest.approx(ph.zeta1 + ph.zeta2 + 2.0 * ps, rel=1e-12)


def test_phases_match_quadrature_oracle():
    # mpmath.quad at dps 30 for delta=1, eps0=1.2, A=3, omega=0.6
    ph = aim_phases(TlsParams(delta=1.0, eps0=1.2), Drive.cosine(A=3.0, omega=0.6))
    assert ph.zeta1 == pytest.approx(9.4185081807785957504, rel=1e-12)
    assert ph.zeta2 == pytest.approx(3.0770493992136651271, rel=1e-12)
    assert ph.t1 == pytest.approx(1.9321324678790143331, rel=1e-12)
    assert ph.t2 == pytest.approx(8.5398430440869631285, rel=1e-12)


def test_small_offset_limits():
    # nearly diabatic (Delta/A = 0.05), small offset: the phase sum tends to
    # 2A/(hbar omega) and the difference to pi eps0/(hbar omega)
    p = TlsParams(delta=0.05, eps0=0.01)
    ph = aim_phases(p, Drive.cosine(A=1.0, omega=0.3))
    assert ph.zeta1 + ph.zeta2 == pytest.approx(2.0 / 0.3, rel=0.05)
    assert ph.zeta_minus == pytest.approx(math.pi * 0.01 / 0.3, rel=1e-3)


def test_crossing_preconditions():
    with pytest.raises(NoCrossing):
        aim_phases(TlsParams(delta=1.0, eps0=2.5), Drive.cosine(A=2.0, omega=1.0))
    with pytest.raises(NoCrossing):
        crossing_adiabaticity(TlsParams(delta=1.0, eps0=2.0), Drive.cosine(A=2.0, omega=1.0))
    with pytest.raises(ValueError):
        aim_phases(P1, Drive.linear(1.0))


def test_crossing_adiabaticity_value():
    p = TlsParams(delta=0.7, eps0=0.5)
    d = Drive.cosine(A=1.3, omega=0.25)
    a = crossing_adiabaticity(p, d)
    v_eff = 0.25 * math.sqrt(1.3**2 - 0.5**2)
    assert a.delta == pytest.approx(0.7**2 / (4.0 * v_eff), rel=1e-14)


def test_validity_warning_gate():
    # half-period far below the single-passage transition span
    with pytest.warns(UserWarning):
        aim_phases(P1, Drive.cosine(A=0.1, omega=5.0))
    # same effective sweep rate, hundredfold longer period
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        aim_phases(P1, Drive.cosine(A=10.0, omega=0.05))
    assert not rec


def test_phase_set_validation():
    with pytest.raises(ValueError):
        AimPhases(zeta1=1.0, zeta2=0.5, zeta_plus=10.0, zeta_minus=0.5,
                  phi_st=1.2, t1=0.0, t2=1.0)
    with pytest.raises(ValueError):
        AimPhases(zeta1=1.0, zeta2=0.5, zeta_plus=1.9, zeta_minus=-0.5,
                  phi_st=1.2, t1=0.0, t2=1.0)
    with pytest.raises(ValueError):
        AimPhases.from_zetas(math.inf, 0.0, 0.2)
    ph = AimPhases.from_zetas(1.0, 0.5, 0.2)
    assert math.isnan(ph.t1) and math.isnan(ph.t2)
    assert ph.stokes == pytest.approx(0.2, abs=1e-15)


# ---------------------------------------------------------------------------
# period matrix


def test_period_matrix_closed_form():
    a = Adiabaticity(0.2)
    plz = lzsm_probability(a)
    ps = stokes_phase(a)
    ph = AimPhases.from_zetas(1.3, 0.4, ps)
    pm = period_matrix(ph, a)
    xi11 = (1.0 - plz) * cmath.exp(1j * ph.zeta_plus) + plz * cmath.exp(-1j * ph.zeta_minus)
    xi12 = 2.0j * math.sqrt(plz * (1.0 - plz)) * math.sin(ph.phi_st)
    assert abs(pm.xi.m11 - xi11) < 1e-12
    assert abs(pm.xi.m12 - xi12) < 1e-12
    assert abs(pm.xi.m21 - xi12) < 1e-12
    assert abs(pm.xi.m22 - xi11.conjugate()) < 1e-12
    assert pm.xi.unitarity_defect() < 1e-12
    assert pm.phi == pytest.approx(math.acos(xi11.real), rel=1e-12)


def test_period_matrix_crossing_convention():
    a = Adiabaticity(0.2)
    ph = AimPhases.from_zetas(1.3, 0.4, stokes_phase(a))
    sym = period_matrix(ph, a)
    crs = period_matrix(ph, a, convention="crossing")
    # shared diagonal and eigenphase; off-diagonal differs by a phase only
    assert abs(crs.xi.m11 - sym.xi.m11) < 1e-12
    assert abs(crs.xi.m22 - sym.xi.m22) < 1e-12
    assert abs(abs(crs.xi.m12) - abs(sym.xi.m12)) < 1e-12
    assert abs(crs.xi.m21 + crs.xi.m12.conjugate()) < 1e-12
    assert crs.phi == pytest.approx(sym.phi, abs=1e-12)
    assert crs.xi.unitarity_defect() < 1e-12
    with pytest.raises(ValueError):
        period_matrix(ph, a, convention="midpoint")


def test_period_matrix_consistency_guard():
    a = Adiabaticity(0.2)
    ph = AimPhases.from_zetas(1.3, 0.4, stokes_phase(Adiabaticity(0.5)))
    with pytest.raises(ValueError):
        period_matrix(ph, a)


def test_pure_phase_without_transitions():
    # delta = 125 underflows the passage probability to exactly zero
    a = Adiabaticity(125.0)
    assert lzsm_probability(a) == 0.0
    ph = AimPhases.from_zetas(0.7, 0.2, stokes_phase(a))
    pm = period_matrix(ph, a)
    assert abs(pm.xi.m12) == 0.0
    assert abs(pm.xi.m11) == pytest.approx(1.0, abs=1e-15)
    for n in (0, 1, 7, 100):
        assert n_period_occupation(pm, n) == 0.0


@settings(max_examples=80, deadline=None)
@given(
    delta=st.floats(min_value=0.01, max_value=3.0),
    zeta1=st.floats(min_value=-10.0, max_value=10.0),
    zeta2=st.floats(min_value=-10.0, max_value=10.0),
    n=st.integers(min_value=0, max_value=10_000),
)
def test_stueckelberg_identity_property(delta, zeta1, zeta2, n):
    a = Adiabaticity(delta)
    plz = lzsm_probability(a)
    ph = AimPhases.from_zetas(zeta1, zeta2, stokes_phase(a))
    pm = period_matrix(ph, a)
    assert abs(pm.xi.m12) ** 2 == pytest.approx(
        4.0 * plz * (1.0 - plz) * math.sin(ph.phi_st) ** 2, abs=1e-12
    )
    # the imaginary part carries the resonance condition
    assert pm.xi.m11.imag == pytest.approx(
        (1.0 - plz) * math.sin(ph.zeta_plus) - plz * math.sin(ph.zeta_minus), abs=1e-12
    )
    assert abs(pm.xi.m11.real) <= 1.0 + 1e-15
    assert 0.0 <= n_period_occupation(pm, n) <= 1.0


# ---------------------------------------------------------------------------
# staircase and averages


def test_staircase_values():
    pm = constructive_matrix()
    assert n_period_occupation(pm, 0) == 0.0
    # double passage: 4 P (1-P) sin^2(Phi_St) with sin = 1
    assert n_period_occupation(pm, 1) == pytest.approx(0.36, abs=1e-12)
    assert n_period_occupation(pm, 2) == pytest.approx(0.9216, abs=1e-12)
    assert n_period_occupation(pm, 5) == pytest.approx(0.0057519, abs=2e-6)
    with pytest.raises(ValueError):
        n_period_occupation(pm, -1)
    with pytest.raises(ValueError):
        n_period_occupation(pm, 1.5)


def test_staircase_period_in_n():
    # build phi = pi/7 exactly: zeta_minus = 0 and cos(zeta_plus) chosen so
    # Re Xi11 = cos(pi/7)
    plz = 0.2
    a = Adiabaticity(math.log(1.0 / plz) / (2.0 * math.pi))
    ps = stokes_phase(a)
    zp = math.acos((math.cos(math.pi / 7.0) - plz) / (1.0 - plz))
    ph = AimPhases.from_zetas(0.5 * zp - ps, 0.5 * zp - ps, ps)
    pm = period_matrix(ph, a)
    assert math.pi / pm.phi == pytest.approx(7.0, rel=1e-9)
    for n in range(21):
        assert n_period_occupation(pm, n + 7) == pytest.approx(
            n_period_occupation(pm, n), abs=1e-12
        )


def test_power_matches_matrix_power():
    a = Adiabaticity(0.3)
    ph = AimPhases.from_zetas(1.1, 0.35, stokes_phase(a))
    pm = period_matrix(ph, a)
    for n in (0, 1, 7, 123, 10_000):
        direct = np.linalg.matrix_power(pm.xi.as_array(), n)
        assert np.max(np.abs(pm.power(n).as_array() - direct)) < 1e-10
    # frozen matrix: phi = 0 gives the identity for every n
    a0 = Adiabaticity(30.0)
    ps = stokes_phase(a0)
    frozen = period_matrix(AimPhases.from_zetas(-ps, -ps, ps), a0)
    assert frozen.phi == pytest.approx(0.0, abs=1e-7)
    assert np.max(np.abs(frozen.power(5).as_array() - np.eye(2))) < 1e-12


def test_staircase_tracks_ode_at_offset():
    # moderately slow drive, P = 0.3, eps0/A = 0.6: the impulse staircase
    # follows the integrated dynamics sampled at whole periods
    dlt = math.log(1.0 / 0.3) / (2.0 * math.pi)
    omega = 0.25
    amp = 1.0 / (4.0 * dlt * omega * math.sqrt(1.0 - 0.36))
    p = TlsParams(delta=1.0, eps0=0.6 * amp)
    d = Drive.cosine(A=amp, omega=omega)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        ph = aim_phases(p, d)
    assert not rec
    pm = period_matrix(ph, crossing_adiabaticity(p, d))

    period = 2.0 * math.pi / omega
    spec = EvolutionSpec(params=p, drive=d, t_start=0.0, t_end=12.0 * period,
                         dt_max=period / 64.0)
    traj = evolve_schrodinger(spec, AmplitudePair(1.0, 0.0, basis=Basis.ADIABATIC))
    diffs = [
        abs(n_period_occupation(pm, n) - traj.observables[64 * n]) for n in range(13)
    ]
    assert max(diffs) < 0.06


def test_rabi_like_frequency_values():
    pm = constructive_matrix()
    assert pm.xi.m11.real == pytest.approx(-0.8, abs=1e-12)
    assert rabi_like_frequency(pm, 1.0) == pytest.approx(0.20483276469913342, rel=1e-12)
    a0 = Adiabaticity(30.0)
    ps = stokes_phase(a0)
    frozen = period_matrix(AimPhases.from_zetas(-ps, -ps, ps), a0)
    assert rabi_like_frequency(frozen, 2.0) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(ValueError):
        rabi_like_frequency(pm, 0.0)


@pytest.mark.filterwarnings("ignore:drive half-period")
def test_rabi_frequency_scales_with_amplitude():
    # nearly adiabatic passages: the beat frequency slope against A is
    # 2/(pi hbar) wherever the folded phase stays mid-branch
    omega = 0.025
    p = P1

    def beat(amp):
        d = Drive.cosine(A=amp, omega=omega)
        ph = aim_phases(p, d)
        pm = period_matrix(ph, crossing_adiabaticity(p, d))
        return rabi_like_frequency(pm, omega), ph.zeta_plus

    amp = 5.0
    val, zp = beat(amp)
    while not 0.5 < (zp % math.pi) < 2.6:
        amp += 0.002
        val, zp = beat(amp)
    val2, _ = beat(amp + 1e-4)
    slope = abs(val2 - val) / 1e-4
    assert slope == pytest.approx(2.0 / math.pi, rel=0.1)


def test_averaged_occupation_limits():
    # frozen staircase: off-diagonal exactly zero once P underflows
    a0 = Adiabaticity(125.0)
    ps0 = stokes_phase(a0)
    frozen = period_matrix(AimPhases.from_zetas(-ps0, -ps0, ps0), a0)
    assert averaged_occupation(frozen) == 0.0
    # resonance: Im Xi11 = 0 with transitions present gives exactly 1/2;
    # the resonant zeta_plus shifts off pi when zeta_minus is nonzero
    plz = 0.03
    a = Adiabaticity(math.log(1.0 / plz) / (2.0 * math.pi))
    ps = stokes_phase(a)
    zm = 0.3
    zp = math.pi - math.asin(plz * math.sin(zm) / (1.0 - plz))
    ph = AimPhases.from_zetas(0.5 * (zp + zm) - ps, 0.5 * (zp - zm) - ps, ps)
    pm = period_matrix(ph, a)
    assert pm.xi.m11.imag == pytest.approx(0.0, abs=1e-12)
    assert averaged_occupation(pm) == pytest.approx(0.5, abs=1e-12)
    # the small-P closed form puts its half-point at zeta_plus = pi instead
    ph2 = AimPhases.from_zetas(0.5 * (math.pi + zm) - ps, 0.5 * (math.pi - zm) - ps, ps)
    assert slow_passage_avg(ph2, plz) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.filterwarnings("ignore:drive half-period")
def test_slow_passage_closed_form():
    # antiresonance: numerator vanishes on the whole zeta lattice cos=cos=1
    ph = AimPhases.from_zetas(math.pi, math.pi, 0.0)
    assert slow_passage_avg(ph, 0.02) == 0.0
    with pytest.raises(ValueError):
        slow_passage_avg(ph, 1.5)
    # agreement with the matrix average tightens as P shrinks
    omega = 0.35
    prev = math.inf
    for p0, bound in ((0.005, 6e-3), (0.0005, 1e-3)):
        dlt = math.log(1.0 / p0) / (2.0 * math.pi)
        amp = 1.0 / (4.0 * dlt * omega)
        worst = 0.0
        for e0 in np.linspace(0.0, 0.6 * amp, 800)[::4]:
            p = TlsParams(delta=1.0, eps0=float(e0))
            d = Drive.cosine(A=amp, omega=omega)
            ph = aim_phases(p, d)
            a = crossing_adiabaticity(p, d)
            diff = abs(
                averaged_occupation(period_matrix(ph, a))
                - slow_passage_avg(ph, lzsm_probability(a))
            )
            worst = max(worst, diff)
        assert worst < bound
        assert worst < prev
        prev = worst


def test_slow_passage_resonance_parity_against_ode():
    # zeta_plus = 9 pi must be a full resonance and 10 pi a frozen point;
    # amplitudes solved beforehand for omega A = 1/(4 * 0.65)
    rate = 1.0 / (4.0 * 0.65)
    for amp, mult, lo, hi in ((2.02647, 9, 0.47, 0.53), (2.16260, 10, 0.0, 0.06)):
        omega = rate / amp
        d = Drive.cosine(A=amp, omega=omega)
        ph = aim_phases(P1, d)
        assert ph.zeta_plus == pytest.approx(mult * math.pi, abs=2e-3)
        period = 2.0 * math.pi / omega
        spec = EvolutionSpec(params=P1, drive=d, t_start=0.0, t_end=100.0 * period,
                             dt_max=period / 48.0, rel_tol=1e-9, abs_tol=1e-11)
        traj = evolve_schrodinger(spec, AmplitudePair(1.0, 0.0, basis=Basis.ADIABATIC))
        avg = float(np.mean(traj.observables))
        assert lo <= avg <= hi


# ---------------------------------------------------------------------------
# fast passage


@pytest.mark.filterwarnings("ignore:drive half-period")
def test_fast_passage_resonance_and_zero():
    d = Drive.cosine(A=4.0, omega=1.0)
    # exact k-photon resonance with a finite gap
    assert fast_passage_avg(TlsParams(delta=0.08, eps0=2.0), d, 2) == 0.5
    # amplitude at the cosine zero kills the k = 0 resonance
    d0 = Drive.cosine(A=0.75 * math.pi, omega=1.0)
    assert fast_passage_avg(TlsParams(delta=0.08, eps0=0.3), d0, 0) < 1e-30
    with pytest.raises(ValueError):
        fast_passage_avg(TlsParams(delta=0.08, eps0=0.3), Drive.cosine(A=0.0, omega=1.0), 0)
    with pytest.raises(ValueError):
        fast_passage_avg(TlsParams(delta=0.08, eps0=0.3), d, 1.5)


@pytest.mark.filterwarnings("ignore:drive half-period")
def test_fast_passage_sum_over_resonances():
    p = TlsParams(delta=0.08, eps0=1.02)
    d = Drive.cosine(A=4.0, omega=1.0)
    single = fast_passage_avg(p, d, 1)
    total = fast_passage_avg(p, d)
    assert single <= total <= min(0.5, single + 5e-3)
    # far outside the crossing range the tails persist
    far = fast_passage_avg(TlsParams(delta=0.08, eps0=6.0), d, 6)
    assert 0.0 < far <= 0.5


def test_fast_passage_matches_bessel_lorentzian():
    # k = 0 line: the cosine asymptote reproduces the Bessel-gap Lorentzian
    # on the probability scale; higher k inherits the (4k^2-1)/(8x) phase
    # error of the asymptote and is checked through zero positions instead
    worst = 0.0
    for aw in np.linspace(3.0, 8.0, 26):
        gap = 0.08 * jv(0, aw)
        if abs(jv(0, aw)) < 0.1:
            continue
        for det in np.linspace(-5.0 * abs(gap), 5.0 * abs(gap), 11):
            p = TlsParams(delta=0.08, eps0=-float(det))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                got = fast_passage_avg(p, Drive.cosine(A=float(aw), omega=1.0), 0)
            ref = 0.5 * gap * gap / (gap * gap + det * det)
            worst = max(worst, abs(got - ref))
    assert worst < 0.02


def test_fast_passage_cdt_positions():
    # gap zeros sit at the Bessel zeros up to the asymptote's phase error
    def dip(k, amp):
        p = TlsParams(delta=0.08, eps0=k * 1.0 + 0.003)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return fast_passage_avg(p, Drive.cosine(A=float(amp), omega=1.0), k)

    for k, tol in ((0, 0.03), (1, 0.12)):
        for zero in jn_zeros(k, 5):
            if not 3.0 <= zero <= 9.0:
                continue
            res = minimize_scalar(
                lambda amp: dip(k, amp),
                bounds=(zero - 0.45, zero + 0.45),
                method="bounded",
                options={"xatol": 1e-8},
            )
            assert abs(res.x - zero) < tol

"""Adiabatic-impulse model for a periodically driven two-level system.

The drive period is split into free adiabatic evolution segments joined by
instantaneous transitions at the quasicrossings (the zeros of the full bias
``eps0 + drive``).  Free evolution over an accumulated phase zeta multiplies
the adiabatic pair (E-, E+) by diag(e^{+i zeta}, e^{-i zeta}); each crossing
applies the single-passage matrix N of :func:`lzsm.weber.transition_matrix_N`
with the local sweep rate.  For a cosine bias the period anchored at the
drive minimum reads

    Xi = sqrt(U2) . N^T . U1 . N . sqrt(U2)

with U_k = diag(e^{+i zeta_k}, e^{-i zeta_k}): half of the outer segment,
the upward crossing, the inner segment (bias above the crossing), the
downward crossing, the other outer half.  Entrywise,

    Xi11 = (1-P) e^{+i zeta_plus} + P e^{-i zeta_minus},   Xi22 = conj(Xi11)
    Xi12 = Xi21 = 2i sqrt(P(1-P)) sin(Phi_St)

where P is the single-passage probability, zeta_plus = zeta1 + zeta2 + 2 phi_S,
zeta_minus = zeta1 - zeta2, and Phi_St = phi_S + zeta1 is the Stueckelberg
phase of the inner segment.  Populations after n periods, the Rabi-like beat
of their staircase, and long-time averages all derive from Xi; closed
slow-passage and fast-passage limits are provided separately.

All operations assume the quasicrossings exist (|eps0| < A); the fast-passage
Lorentzians remain defined outside that range as detuning tails.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import HBAR, Drive, NoCrossing, TlsParams, drive_sample
from .weber import (
    Adiabaticity,
    TransferMatrix,
    lzsm_probability,
    stokes_phase,
    transition_matrix_N,
    transition_times,
)

__all__ = [
    "AimPhases",
    "PeriodMatrix",
    "aim_phases",
    "averaged_occupation",
    "crossing_adiabaticity",
    "fast_passage_avg",
    "n_period_occupation",
    "period_matrix",
    "rabi_like_frequency",
    "slow_passage_avg",
]

_QUAD_OPTS = {"epsabs": 1e-12, "epsrel": 1e-12, "limit": 200}


@dataclass(frozen=True)
class AimPhases:
    """Adiabatic phases of one drive period.

    zeta1 covers the segment between the upward crossing t1 and the downward
    crossing t2 (bias above the crossing); zeta2 covers the remainder of the
    period.  zeta_plus folds in twice the Stokes phase; phi_st is the
    Stueckelberg phase phi_S + zeta1.  Synthetic phase sets built with
    :meth:`from_zetas` carry nan crossing times.
    """

    zeta1: float
    zeta2: float
    zeta_plus: float
    zeta_minus: float
    phi_st: float
    t1: float
    t2: float

    def __post_init__(self) -> None:
        for name in ("zeta1", "zeta2", "zeta_plus", "zeta_minus", "phi_st"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        scale = max(1.0, abs(self.zeta_plus), abs(self.zeta_minus))
        if abs(self.zeta_minus - (self.zeta1 - self.zeta2)) > 1e-9 * scale:
            raise ValueError("zeta_minus must equal zeta1 - zeta2")
        # zeta_plus = zeta1 + zeta2 + 2 phi_S with phi_S = phi_st - zeta1
        if abs(self.zeta_plus - (self.zeta2 - self.zeta1 + 2.0 * self.phi_st)) > 1e-9 * scale:
            raise ValueError("zeta_plus, phi_st inconsistent with zeta1, zeta2")

    @property
    def stokes(self) -> float:
        return self.phi_st - self.zeta1

    @staticmethod
    def from_zetas(zeta1: float, zeta2: float, stokes: float) -> "AimPhases":
        """Assemble a phase set directly from segment phases and phi_S."""
        z1, z2, ps = float(zeta1), float(zeta2), float(stokes)
        return AimPhases(
            zeta1=z1,
            zeta2=z2,
            zeta_plus=z1 + z2 + 2.0 * ps,
            zeta_minus=z1 - z2,
            phi_st=ps + z1,
            t1=math.nan,
            t2=math.nan,
        )


@dataclass(frozen=True)
class PeriodMatrix:
    """One-period transfer matrix Xi and its eigenphase phi = arccos Re Xi11."""

    xi: TransferMatrix
    phi: float

    def __post_init__(self) -> None:
        if self.xi.unitarity_defect() > 1e-6:
            raise ValueError("Xi must be unitary")
        if not 0.0 <= self.phi <= math.pi:
            raise ValueError("phi must lie in [0, pi]")

    def power(self, n: int) -> TransferMatrix:
        """Xi^n through the eigenphase (Cayley-Hamilton for unit-determinant
        matrices with real trace): Xi^n = cos(n phi) I + sin(n phi)/sin(phi)
        (Xi - cos(phi) I); at sin(phi) = 0 the matrix is +-I exactly."""
        if int(n) != n or n < 0:
            raise ValueError("n must be a nonnegative integer")
        n = int(n)
        m = self.xi.as_array()
        s = math.sin(self.phi)
        if abs(s) < 1e-12:
            sign = 1.0 if math.cos(self.phi) > 0.0 else -1.0
            return TransferMatrix.from_array(sign**n * np.eye(2, dtype=complex))
        ratio = math.sin(n * self.phi) / s
        out = math.cos(n * self.phi) * np.eye(2, dtype=complex) + ratio * (
            m - math.cos(self.phi) * np.eye(2, dtype=complex)
        )
        return TransferMatrix.from_array(out)


def _require_cosine(d: Drive) -> None:
    if d.kind != "cosine":
        raise ValueError("the adiabatic-impulse period needs a cosine drive")


def crossing_adiabaticity(p: TlsParams, d: Drive) -> Adiabaticity:
    """Adiabaticity parameter of the linearized sweep at the quasicrossing.

    The bias crosses zero with local rate v_eff = omega sqrt(A^2 - eps0^2).
    """
    _require_cosine(d)
    if abs(p.eps0) >= d.A:
        raise NoCrossing("quasicrossings need |eps0| < A")
    v_eff = d.omega * math.sqrt(d.A**2 - p.eps0**2)
    return Adiabaticity.from_sweep(p, v_eff)


def _validity_warning(p: TlsParams, d: Drive, basis: str) -> None:
    """Warn when the impulse picture is strained: the free half-period must
    exceed the jump-plus-settling span of a single passage."""
    a = crossing_adiabaticity(p, d)
    if a.delta <= 0.0:
        return
    v_eff = d.omega * math.sqrt(d.A**2 - p.eps0**2)
    times = transition_times(a, v_eff, basis=basis)
    half_period = math.pi / d.omega
    if half_period < times.t_jump + times.t_relax:
        warnings.warn(
            "drive half-period is shorter than the passage transition span; "
            "the adiabatic-impulse picture is unreliable here",
            stacklevel=3,
        )


def aim_phases(p: TlsParams, d: Drive) -> AimPhases:
    """Quasicrossing instants and adiabatic phases of one cosine-drive period.

    The period is anchored at the drive minimum (omega t = phase), so the
    upward crossing satisfies cos(omega t1 - phase) = eps0/A with
    omega t1 - phase in (0, pi) and the downward one mirrors it at
    2 pi - (omega t1 - phase).  Each zeta is the half-integral of the
    adiabatic splitting over its segment.
    """
    _require_cosine(d)
    if abs(p.eps0) >= d.A:
        raise NoCrossing("quasicrossings need |eps0| < A")
    _validity_warning(p, d, basis="adiabatic")

    w = d.omega
    x1 = math.acos(p.eps0 / d.A)
    t1 = (d.phase + x1) / w
    t2 = (d.phase + 2.0 * math.pi - x1) / w
    period = 2.0 * math.pi / w

    def gap_rate(t: float) -> float:
        return math.hypot(p.delta, p.eps0 + drive_sample(d, t)) / (2.0 * HBAR)

    zeta1 = quad(gap_rate, t1, t2, **_QUAD_OPTS)[0]
    zeta2 = quad(gap_rate, t2, t1 + period, **_QUAD_OPTS)[0]
    phi_s = stokes_phase(crossing_adiabaticity(p, d))
    return AimPhases(
        zeta1=zeta1,
        zeta2=zeta2,
        zeta_plus=zeta1 + zeta2 + 2.0 * phi_s,
        zeta_minus=zeta1 - zeta2,
        phi_st=phi_s + zeta1,
        t1=t1,
        t2=t2,
    )


def period_matrix(ph: AimPhases, a: Adiabaticity, convention: str = "symmetric") -> PeriodMatrix:
    """One-period transfer matrix in the adiabatic basis.

    ``symmetric`` splits the outer segment around the drive minimum,
    sqrt(U2) N^T U1 N sqrt(U2); ``crossing`` anchors the period just before
    the upward crossing instead, U2 N^T U1 N.  The two share the diagonal
    (hence all occupation observables) and differ only in the complex phase
    of the off-diagonal entries.
    """
    if convention not in ("symmetric", "crossing"):
        raise ValueError("convention must be 'symmetric' or 'crossing'")
    if abs(ph.stokes - stokes_phase(a)) > 1e-9:
        raise ValueError("phase set and adiabaticity disagree on the Stokes phase")

    n = transition_matrix_N(a).as_array()
    u1 = np.diag([cmath.exp(1j * ph.zeta1), cmath.exp(-1j * ph.zeta1)])
    inner = n.T @ u1 @ n
    if convention == "symmetric":
        half = np.diag([cmath.exp(0.5j * ph.zeta2), cmath.exp(-0.5j * ph.zeta2)])
        xi = half @ inner @ half
    else:
        u2 = np.diag([cmath.exp(1j * ph.zeta2), cmath.exp(-1j * ph.zeta2)])
        xi = u2 @ inner
    phi = math.acos(min(1.0, max(-1.0, xi[0, 0].real)))
    return PeriodMatrix(xi=TransferMatrix.from_array(xi), phi=phi)


def n_period_occupation(pm: PeriodMatrix, n: int) -> float:
    """Upper-level occupation after n whole periods, P(n) = |Xi21|^2
    sin^2(n phi)/sin^2(phi), for a system starting in the lower adiabatic
    state at the period anchor."""
    if int(n) != n or n < 0:
        raise ValueError("n must be a nonnegative integer")
    n = int(n)
    q = abs(pm.xi.m21) ** 2
    s = math.sin(pm.phi)
    if s * s < 1e-24:
        # frozen limit: |Xi21| <= |sin phi|, so the occupation stays at the
        # quadratic ramp n^2 |Xi21|^2 until it is indistinguishable from 0
        return min(1.0, float(n * n) * q)
    val = q * math.sin(n * pm.phi) ** 2 / (s * s)
    return min(1.0, max(0.0, val))


def rabi_like_frequency(pm: PeriodMatrix, omega: float) -> float:
    """Coarse-grained beat frequency of the n-period staircase.

    sin^2(n phi) sampled at integer n beats at the distance of phi from the
    nearer of {0, pi}, which is arccos|Re Xi11|; scaled by omega/pi this is
    the Rabi-like angular frequency.  Frozen dynamics (phi = 0 or pi) gives 0.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    return (omega / math.pi) * math.acos(min(1.0, abs(pm.xi.m11.real)))


def averaged_occupation(pm: PeriodMatrix) -> float:
    """Long-time average of P(n): half the Lorentzian weight
    |Xi21|^2 / (|Xi21|^2 + Im^2 Xi11), maximal (1/2) exactly on resonance
    Im Xi11 = 0, zero when the off-diagonal vanishes (frozen staircase)."""
    q = abs(pm.xi.m21) ** 2
    den = q + pm.xi.m11.imag**2
    if den == 0.0:
        return 0.0
    return 0.5 * q / den


def slow_passage_avg(ph: AimPhases, plz: float) -> float:
    """Slow-passage (small single-passage probability) closed form of the
    long-time average,

        P (1 - cos zeta_plus cos zeta_minus)
        ------------------------------------------------
        sin^2 zeta_plus + 2 P (1 - cos zeta_plus cos zeta_minus)

    It agrees with :func:`averaged_occupation` exactly on resonance centers
    and differs by an odd skew term of order P sin(zeta_plus) sin(zeta_minus)
    on the resonance shoulders, which decays with P.
    """
    if not 0.0 <= plz <= 1.0:
        raise ValueError("the passage probability must lie in [0, 1]")
    num = plz * (1.0 - math.cos(ph.zeta_plus) * math.cos(ph.zeta_minus))
    den = math.sin(ph.zeta_plus) ** 2 + 2.0 * num
    if den == 0.0:
        return 0.0
    return num / den


def _fast_passage_gap(p: TlsParams, d: Drive, k: int) -> float:
    """Effective gap of the k-photon resonance in the fast-passage limit,
    Delta sqrt(2 hbar omega / (pi A)) cos(A/(hbar omega) - (2k+1) pi/4);
    asymptotically Delta J_k(A / hbar omega)."""
    hw = HBAR * d.omega
    return (
        p.delta
        * math.sqrt(2.0 * hw / (math.pi * d.A))
        * math.cos(d.A / hw - 0.25 * math.pi * (2 * k + 1))
    )


def fast_passage_avg(p: TlsParams, d: Drive, k: int | None = None) -> float:
    """Time-averaged upper diabatic occupation near multiphoton resonances
    in the fast-passage limit: a Lorentzian (1/2) Delta_k^2 / (Delta_k^2 +
    (k hbar omega - eps0)^2) per resonance, summed over k when k is None.

    Evaluates for any eps0 (the tails persist past |eps0| = A even though
    the underlying period matrix loses its crossings there).
    """
    _require_cosine(d)
    if d.A <= 0.0:
        raise ValueError("fast passage needs a positive drive amplitude")
    if abs(p.eps0) < d.A:
        _validity_warning(p, d, basis="diabatic")

    hw = HBAR * d.omega

    def lorentzian(kk: int) -> float:
        gap = _fast_passage_gap(p, d, kk)
        det = kk * hw - p.eps0
        den = gap * gap + det * det
        if den == 0.0:
            return 0.0
        return 0.5 * gap * gap / den

    if k is not None:
        if int(k) != k:
            raise ValueError("k must be an integer")
        return lorentzian(int(k))
    center = round(p.eps0 / hw)
    span = math.ceil(d.A / hw) + 10
    total = sum(lorentzian(kk) for kk in range(center - span, center + span + 1))
    return min(0.5, total)

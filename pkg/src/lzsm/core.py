"""Shared types for a driven two-level system.

The Hamiltonian convention used throughout the package is

    H(t) = -(Delta/2) sigma_x - (eps(t)/2) sigma_z,
    eps(t) = eps0 + drive_sample(drive, t),

in the diabatic basis {|0>, |1>} with sigma_z|0> = +|0>.  The diabatic
energies are then -eps/2 for |0> and +eps/2 for |1>, so |1> is the ground
state for eps -> -inf.  Adiabatic states are ordered (|E->, |E+>) with
E_-(t) <= E_+(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "HBAR",
    "AmplitudePair",
    "BackendDomainError",
    "Basis",
    "BlochState",
    "DissipationParams",
    "Drive",
    "FitDegenerate",
    "GimbalDegenerate",
    "InsufficientTruncation",
    "LzsmError",
    "NoCrossing",
    "NonDifferentiableDrive",
    "NonFiniteInput",
    "NonPeriodicDrive",
    "OrderOutOfRange",
    "RootNotFound",
    "StepSizeUnderflow",
    "TlsParams",
    "ToleranceNotMet",
    "adiabatic_levels",
    "drive_derivative",
    "drive_period",
    "drive_phase_integral",
    "drive_sample",
    "mixing_coefficients",
    "rotate_basis",
    "rotation_matrix",
]

#: Reduced Planck constant in the package's natural units.  All energies,
#: rates and times are expressed consistently with this value; keeping the
#: symbol explicit keeps formulas dimensionally readable.
HBAR = 1.0


class LzsmError(Exception):
    """Base class for package errors."""


class NonDifferentiableDrive(LzsmError):
    """Operation requires d(eps)/dt but the drive has jumps or kinks."""


class NonPeriodicDrive(LzsmError):
    """Operation requires a periodic drive."""


class NoCrossing(LzsmError):
    """The drive never crosses eps = 0, so crossing times are undefined."""


class OrderOutOfRange(LzsmError):
    """Special-function order outside the supported range."""


class NonFiniteInput(LzsmError):
    """A non-finite number reached a numerical kernel."""


class RootNotFound(LzsmError):
    """Root search failed to converge."""


class StepSizeUnderflow(LzsmError):
    """Integrator step size collapsed below machine resolution."""


class ToleranceNotMet(LzsmError):
    """Integrator could not satisfy the requested tolerances."""


class InsufficientTruncation(LzsmError):
    """Truncated expansion did not converge at the allowed size."""


class BackendDomainError(LzsmError):
    """Requested point lies outside a backend's domain of validity."""


class FitDegenerate(LzsmError):
    """Too few usable data points to fit."""


class GimbalDegenerate(LzsmError):
    """Euler-angle extraction got an input without a valid rotation."""


@dataclass(frozen=True)
class TlsParams:
    """Static two-level system parameters.

    Parameters
    ----------
    delta : float
        Tunnel coupling Delta > 0 (minimal gap at eps = 0).
    eps0 : float
        Static bias offset added to the drive.
    """

    delta: float
    eps0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.delta > 0.0) or not math.isfinite(self.delta):
            raise ValueError("delta must be a positive finite number")
        if not math.isfinite(self.eps0):
            raise ValueError("eps0 must be finite")


class Basis:
    """Basis labels for amplitudes and observables."""

    DIABATIC = "diabatic"
    ADIABATIC = "adiabatic"


@dataclass(frozen=True)
class Drive:
    """Time-dependent bias eps_tilde(t); the full bias is eps0 + eps_tilde(t).

    Construct through the factory methods rather than directly:

    - ``Drive.linear(v)``: eps_tilde = v * t
    - ``Drive.cosine(A, omega, phase)``: eps_tilde = -A cos(omega t - phase)
    - ``Drive.latching(A, omega)``: square wave -A sgn(cos(omega t))
    - ``Drive.biharmonic(A1, A2, omega, ratio, rel_phase)``:
      -A1 cos(omega t) - A2 cos(ratio omega t + rel_phase)
    - ``Drive.sampled(period, samples)``: periodic linear interpolation
      through uniformly spaced samples.

    The minus sign on the cosine kinds puts the drive minimum at t = 0, so a
    system prepared at t = 0 starts far below the crossing when A > |eps0|.
    """

    kind: str
    v: float = 0.0
    A: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    A1: float = 0.0
    A2: float = 0.0
    ratio: int = 2
    rel_phase: float = 0.0
    period: float = 0.0
    samples: tuple = ()

    @staticmethod
    def linear(v: float) -> "Drive":
        if v == 0.0 or not math.isfinite(v):
            raise ValueError("sweep rate v must be nonzero and finite")
        return Drive(kind="linear", v=float(v))

    @staticmethod
    def cosine(A: float, omega: float, phase: float = 0.0) -> "Drive":
        if A < 0.0 or omega <= 0.0:
            raise ValueError("need A >= 0 and omega > 0")
        return Drive(kind="cosine", A=float(A), omega=float(omega), phase=float(phase))

    @staticmethod
    def latching(A: float, omega: float) -> "Drive":
        if A < 0.0 or omega <= 0.0:
            raise ValueError("need A >= 0 and omega > 0")
        return Drive(kind="latching", A=float(A), omega=float(omega))

    @staticmethod
    def biharmonic(
        A1: float, A2: float, omega: float, ratio: int = 2, rel_phase: float = 0.0
    ) -> "Drive":
        if omega <= 0.0:
            raise ValueError("omega must be positive")
        if int(ratio) != ratio or ratio < 1:
            raise ValueError("ratio must be a positive integer")
        return Drive(
            kind="biharmonic",
            A1=float(A1),
            A2=float(A2),
            omega=float(omega),
            ratio=int(ratio),
            rel_phase=float(rel_phase),
        )

    @staticmethod
    def sampled(period: float, samples) -> "Drive":
        vals = tuple(float(s) for s in samples)
        if period <= 0.0:
            raise ValueError("period must be positive")
        if len(vals) < 2:
            raise ValueError("need at least two samples")
        return Drive(kind="sampled", period=float(period), samples=vals)


def drive_period(d: Drive) -> float:
    """Fundamental period of the drive.

    Raises
    ------
    NonPeriodicDrive
        For the linear kind.
    """
    if d.kind == "linear":
        raise NonPeriodicDrive("linear drive has no period")
    if d.kind == "sampled":
        return d.period
    return 2.0 * math.pi / d.omega


def drive_sample(d: Drive, t):
    """Evaluate eps_tilde(t).  Accepts scalars or arrays."""
    if d.kind == "linear":
        return d.v * np.asarray(t) if np.ndim(t) else d.v * t
    if d.kind == "cosine":
        return -d.A * np.cos(d.omega * np.asarray(t) - d.phase) if np.ndim(t) else -d.A * math.cos(d.omega * t - d.phase)
    if d.kind == "latching":
        if np.ndim(t):
            return -d.A * np.sign(np.cos(d.omega * np.asarray(t)))
        return -d.A * float(np.sign(math.cos(d.omega * t)))
    if d.kind == "biharmonic":
        w = d.omega
        if np.ndim(t):
            tt = np.asarray(t)
            return -d.A1 * np.cos(w * tt) - d.A2 * np.cos(d.ratio * w * tt + d.rel_phase)
        return -d.A1 * math.cos(w * t) - d.A2 * math.cos(d.ratio * w * t + d.rel_phase)
    if d.kind == "sampled":
        n = len(d.samples)
        nodes = np.arange(n + 1) * (d.period / n)
        vals = np.asarray(d.samples + (d.samples[0],))
        tm = np.mod(t, d.period)
        out = np.interp(tm, nodes, vals)
        return out if np.ndim(t) else float(out)
    raise ValueError(f"unknown drive kind {d.kind!r}")


def drive_derivative(d: Drive, t):
    """d(eps_tilde)/dt for smooth drive kinds.

    Raises
    ------
    NonDifferentiableDrive
        For latching and sampled kinds (jumps and kinks).
    """
    if d.kind == "linear":
        return d.v * np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else d.v
    if d.kind == "cosine":
        if np.ndim(t):
            return d.A * d.omega * np.sin(d.omega * np.asarray(t) - d.phase)
        return d.A * d.omega * math.sin(d.omega * t - d.phase)
    if d.kind == "biharmonic":
        w = d.omega
        if np.ndim(t):
            tt = np.asarray(t)
            return d.A1 * w * np.sin(w * tt) + d.A2 * d.ratio * w * np.sin(d.ratio * w * tt + d.rel_phase)
        return d.A1 * w * math.sin(w * t) + d.A2 * d.ratio * w * math.sin(d.ratio * w * t + d.rel_phase)
    raise NonDifferentiableDrive(f"{d.kind} drive is not differentiable")


def _latching_phase_integral(d: Drive, t: float) -> float:
    # Integral of -A sgn(cos(omega s)) ds from 0 to t.  The square wave has
    # zero mean, so reduce to one period; within it the integral is piecewise
    # linear with turning points at the quarter periods.
    T = 2.0 * math.pi / d.omega
    n, tm = divmod(t, T)
    q = T / 4.0
    if tm < q:
        val = -d.A * tm
    elif tm < 3.0 * q:
        val = -d.A * q + d.A * (tm - q)
    else:
        val = d.A * q - d.A * (tm - 3.0 * q)
    return val


def drive_phase_integral(d: Drive, t):
    """Exact integral of eps_tilde from 0 to t (closed form per kind)."""
    if d.kind == "linear":
        tt = np.asarray(t) if np.ndim(t) else t
        return 0.5 * d.v * tt * tt
    if d.kind == "cosine":
        w = d.omega
        if np.ndim(t):
            tt = np.asarray(t)
            return -(d.A / w) * (np.sin(w * tt - d.phase) + math.sin(d.phase))
        return -(d.A / w) * (math.sin(w * t - d.phase) + math.sin(d.phase))
    if d.kind == "biharmonic":
        w = d.omega
        rw = d.ratio * w
        if np.ndim(t):
            tt = np.asarray(t)
            return -(d.A1 / w) * np.sin(w * tt) - (d.A2 / rw) * (
                np.sin(rw * tt + d.rel_phase) - math.sin(d.rel_phase)
            )
        return -(d.A1 / w) * math.sin(w * t) - (d.A2 / rw) * (
            math.sin(rw * t + d.rel_phase) - math.sin(d.rel_phase)
        )
    if d.kind == "latching":
        if np.ndim(t):
            return np.array([_latching_phase_integral(d, float(x)) for x in np.asarray(t).ravel()]).reshape(np.shape(t))
        return _latching_phase_integral(d, float(t))
    if d.kind == "sampled":
        return _sampled_phase_integral(d, t)
    raise ValueError(f"unknown drive kind {d.kind!r}")


def _sampled_phase_integral(d: Drive, t):
    n = len(d.samples)
    h = d.period / n
    vals = np.asarray(d.samples + (d.samples[0],))
    # cumulative trapezoid integral at the nodes
    seg = 0.5 * h * (vals[:-1] + vals[1:])
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    per_period = cum[-1]

    def one(x: float) -> float:
        k, tm = divmod(x, d.period)
        i = min(int(tm // h), n - 1)
        frac = tm - i * h
        y0, y1 = vals[i], vals[i + 1]
        # exact integral of the linear interpolant over the partial segment
        part = y0 * frac + 0.5 * (y1 - y0) * frac * frac / h
        return k * per_period + cum[i] + part

    if np.ndim(t):
        return np.array([one(float(x)) for x in np.asarray(t).ravel()]).reshape(np.shape(t))
    return one(float(t))


@dataclass(frozen=True)
class AmplitudePair:
    """State amplitudes (a0, a1) in a declared basis.

    In the diabatic basis the components are the amplitudes of |0> and |1>;
    in the adiabatic basis they are the amplitudes of |E-> and |E+>.
    """

    a0: complex
    a1: complex
    basis: str = Basis.DIABATIC

    def norm(self) -> float:
        return math.sqrt(abs(self.a0) ** 2 + abs(self.a1) ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)


@dataclass(frozen=True)
class BlochState:
    """Bloch vector (x, y, z); z = +1 is the first basis state."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class DissipationParams:
    """Relaxation and dephasing rates, optionally with a bath model.

    gamma1 is the energy relaxation rate, gamma2 the total transverse
    decoherence rate; physicality requires gamma2 >= gamma1 / 2.  When
    alpha_env and temperature are set, rates may instead be derived from the
    bath via :func:`lzsm.dynamics.microscopic_rates`.
    """

    gamma1: float
    gamma2: float
    alpha_env: float | None = None
    temperature: float | None = None

    def __post_init__(self) -> None:
        if self.gamma1 < 0.0 or self.gamma2 < 0.0:
            raise ValueError("rates must be nonnegative")
        if self.gamma2 < 0.5 * self.gamma1 - 1e-15:
            raise ValueError("gamma2 must be at least gamma1 / 2")
        if (self.alpha_env is None) != (self.temperature is None):
            raise ValueError("alpha_env and temperature must be given together")


def adiabatic_levels(p: TlsParams, eps: float):
    """Instantaneous adiabatic energies (E_minus, E_plus) at bias eps.

    E_plus/minus = +-(1/2) sqrt(Delta^2 + eps^2).
    """
    if np.ndim(eps):
        de = 0.5 * np.hypot(p.delta, np.asarray(eps))
    else:
        de = 0.5 * math.hypot(p.delta, eps)
    return -de, de


def mixing_coefficients(p: TlsParams, eps: float):
    """Adiabatic mixing coefficients (gamma_plus, gamma_minus) at bias eps.

    gamma_pm = sqrt((1 pm eps / sqrt(Delta^2 + eps^2)) / 2); equivalently
    gamma_plus = cos(theta/2), gamma_minus = sin(theta/2) with
    theta = atan2(Delta, eps) in (0, pi).  The adiabatic states expand as
    |E-> = gamma_plus |0> + gamma_minus |1> and
    |E+> = gamma_minus |0> - gamma_plus |1>.
    """
    if np.ndim(eps):
        e = np.asarray(eps, dtype=float)
        de = np.hypot(p.delta, e)
        gp = np.sqrt(0.5 * (1.0 + e / de))
        gm = np.sqrt(0.5 * (1.0 - e / de))
        return gp, gm
    de = math.hypot(p.delta, eps)
    gp = math.sqrt(0.5 * (1.0 + eps / de))
    gm = math.sqrt(0.5 * (1.0 - eps / de))
    return gp, gm


def rotation_matrix(p: TlsParams, eps: float) -> np.ndarray:
    """Orthogonal map S from adiabatic (E-, E+) to diabatic (0, 1) amplitudes.

    S is symmetric and involutory (S @ S = I), so the same matrix also maps
    diabatic to adiabatic amplitudes.
    """
    gp, gm = mixing_coefficients(p, eps)
    return np.array([[gp, gm], [gm, -gp]], dtype=float)


def rotate_basis(s: AmplitudePair, p: TlsParams, eps: float, target: str) -> AmplitudePair:
    """Re-express an amplitude pair in the target basis at bias eps."""
    if target not in (Basis.DIABATIC, Basis.ADIABATIC):
        raise ValueError(f"unknown basis {target!r}")
    if s.basis == target:
        return s
    S = rotation_matrix(p, eps)
    vec = S @ s.as_array()
    return AmplitudePair(complex(vec[0]), complex(vec[1]), basis=target)

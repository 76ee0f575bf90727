"""Stationary frequency-domain solvers for the driven two-level system.

Instead of integrating in time, the methods here expand the drive in photon
sidebands.  The common currency is the gap amplitude Delta_k of a periodic
bias, which for a cosine drive reduces to Delta J_k(A / hbar omega).  On top
of it sit the stationary rotating-wave occupation with relaxation, Floquet
quasienergies with nearly degenerate (van Vleck) corrections, the
white-noise rate equation, and a few closed forms: the weak-drive Rabi
lorentzian, the double-passage asymptote, the quantized-field Rabi
frequency, and the Airy approximation of high-order Bessel functions.

Bessel values are produced by downward recurrence with Miller
normalization, the Airy function by a series/asymptotic split, so the
module needs no special-function backend.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    HBAR,
    DissipationParams,
    Drive,
    InsufficientTruncation,
    RootNotFound,
    TlsParams,
    drive_period,
    drive_phase_integral,
    drive_sample,
)

__all__ = [
    "FloquetSpec",
    "FourierGap",
    "KRange",
    "QuasiEnergies",
    "bessel_airy",
    "double_passage_asymptote",
    "floquet_average",
    "floquet_quasienergies",
    "fourier_gap",
    "gvvpt_resonance",
    "gvvpt_shift",
    "multiphoton_rabi",
    "quantum_rabi",
    "rate_W",
    "rate_occupation",
    "rwa_average",
    "weak_drive_rabi",
]


# ---------------------------------------------------------------------------
# special functions


def _bessel_j_row(x: float, k_max: int) -> np.ndarray:
    """J_0(x) .. J_k_max(x) for x >= 0 by Miller's downward recurrence."""
    if x < 0.0 or not math.isfinite(x):
        raise ValueError("Bessel argument must be nonnegative and finite")
    if x == 0.0:
        row = np.zeros(k_max + 1)
        row[0] = 1.0
        return row
    # start far enough above both the order and the turning point that the
    # seeded minimal solution dominates
    start = max(k_max, int(x)) + 26 + int(2.0 * math.sqrt(max(k_max, x)))
    jp, jc = 0.0, 1e-300
    row = np.zeros(k_max + 1)
    norm = 0.0
    for m in range(start, 0, -1):
        jm = (2.0 * m / x) * jc - jp
        jp, jc = jc, jm
        if m - 1 <= k_max:
            row[m - 1] = jc
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2.0 * jc
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            norm *= 1e-250
            row *= 1e-250
    norm += jc
    row /= norm
    return row


def _bessel_j(m: int, x: float) -> float:
    """J_m(x) for integer order of either sign and x >= 0."""
    a = abs(int(m))
    val = float(_bessel_j_row(x, a)[a])
    if m < 0 and a % 2 == 1:
        return -val
    return val


_SQRT_PI = math.sqrt(math.pi)
# u_k = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2)) of the Airy asymptotics
_AIRY_U = tuple(
    math.gamma(3 * k + 0.5) / (54.0**k * math.factorial(k) * math.gamma(k + 0.5))
    for k in range(6)
)


def _airy_ai(u: float) -> float:
    """Airy function Ai(u): Maclaurin series for |u| <= 5, asymptotics beyond."""
    if not math.isfinite(u):
        raise ValueError("Airy argument must be finite")
    if abs(u) <= 5.0:
        # Ai = Ai(0) f(u) + Ai'(0) g(u)
        u3 = u * u * u
        f_term, f_sum = 1.0, 1.0
        g_term, g_sum = u, u
        for k in range(0, 80):
            f_term *= u3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0))
            g_term *= u3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0))
            f_sum += f_term
            g_sum += g_term
            if abs(f_term) < 1e-18 and abs(g_term) < 1e-18:
                break
        return 0.3550280538878172 * f_sum - 0.2588194037928068 * g_sum
    if u > 5.0:
        xi = (2.0 / 3.0) * u**1.5
        s = 0.0
        for k, c in enumerate(_AIRY_U):
            s += (-1.0) ** k * c / xi**k
        return math.exp(-xi) * s / (2.0 * _SQRT_PI * u**0.25)
    v = -u
    xi = (2.0 / 3.0) * v**1.5
    even = sum((-1.0) ** k * _AIRY_U[2 * k] / xi ** (2 * k) for k in range(3))
    odd = sum((-1.0) ** k * _AIRY_U[2 * k + 1] / xi ** (2 * k + 1) for k in range(3))
    return (math.cos(xi - 0.25 * math.pi) * even + math.sin(xi - 0.25 * math.pi) * odd) / (
        _SQRT_PI * v**0.25
    )


def _laguerre(n: int, k: int, x: float) -> float:
    """Associated Laguerre polynomial L_n^k(x) by the three-term recurrence."""
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + k - x
    for m in range(1, n):
        prev, cur = cur, ((2.0 * m + k + 1.0 - x) * cur - (m + k) * prev) / (m + 1.0)
    return cur


def bessel_airy(k: float, x: float) -> float:
    """Airy approximation of J_k(x), usable at non-integer order.

    Accurate for large order near and above the turning point k ~ x; used to
    turn sums of narrow resonances into a smooth envelope.
    """
    if x <= 0.0:
        raise ValueError("the Airy form needs x > 0")
    c = (2.0 / x) ** (1.0 / 3.0)
    return c * _airy_ai(c * (k - x))


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class FourierGap:
    """One photon-sideband gap amplitude of a periodic bias."""

    k: int
    delta_k: complex

    def __post_init__(self) -> None:
        if int(self.k) != self.k:
            raise ValueError("photon index must be an integer")
        if not cmath.isfinite(self.delta_k):
            raise ValueError("gap amplitude must be finite")


@dataclass(frozen=True)
class KRange:
    """Which photon indices a stationary sum runs over.

    ``full(k_max)`` sums k = 0 .. k_max; ``optimized(window)`` keeps only the
    indices within ``window`` of the resonance nearest to the working point.
    """

    kind: str
    value: int

    def __post_init__(self) -> None:
        if self.kind not in ("full", "optimized"):
            raise ValueError("kind must be 'full' or 'optimized'")
        if int(self.value) != self.value or self.value < 0:
            raise ValueError("value must be a nonnegative integer")

    @staticmethod
    def full(k_max: int) -> "KRange":
        return KRange(kind="full", value=int(k_max))

    @staticmethod
    def optimized(window: int = 2) -> "KRange":
        return KRange(kind="optimized", value=int(window))

    def indices(self, eps0: float, omega: float) -> range:
        if omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.kind == "full":
            return range(0, self.value + 1)
        center = round(abs(eps0) / (HBAR * omega))
        return range(max(0, center - self.value), center + self.value + 1)


@dataclass(frozen=True)
class FloquetSpec:
    """Input of a truncated Floquet diagonalization."""

    params: TlsParams
    drive: Drive
    n_max: int = 50

    def __post_init__(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be a positive integer")


@dataclass(frozen=True, eq=False)
class QuasiEnergies:
    """Eigenvalues and Fourier-mode eigenvectors of the Floquet matrix.

    ``eps_j`` holds the quasienergies folded to [-hbar omega/2,
    hbar omega/2); ``raw`` keeps the unfolded eigenvalues in ascending
    order, and ``vectors[j, m, s]`` is the amplitude of diabatic state s in
    Fourier mode m (m = 0 is the lowest kept block) of eigenvector j.
    """

    eps_j: np.ndarray
    vectors: np.ndarray
    raw: np.ndarray
    omega: float
    n_max: int

    def __post_init__(self) -> None:
        if len(self.eps_j) != len(self.raw) or len(self.eps_j) != self.vectors.shape[0]:
            raise ValueError("eigenvalue and eigenvector counts disagree")

    def central_pair(self) -> tuple[float, float]:
        """The two middle eigenvalues, folded to the first zone."""
        m = len(self.raw) // 2
        return (float(self.eps_j[m - 1]), float(self.eps_j[m]))

    def splitting(self) -> float:
        """Folded distance of the central pair, with zone wraparound."""
        a, b = self.central_pair()
        hw = HBAR * self.omega
        d = abs(a - b) % hw
        return min(d, hw - d)


# ---------------------------------------------------------------------------
# the Fourier gap


def _require_cosine(d: Drive) -> None:
    if d.kind != "cosine":
        raise ValueError("this closed form needs a cosine drive")


@lru_cache(maxsize=4096)
def _gap_integral(d: Drive, k: int) -> complex:
    # canonical time origin: first maximum of the drive on a 4096 grid, so
    # the result does not depend on where the caller's period starts
    period = drive_period(d)
    n = 4096
    ts = np.arange(n) * (period / n)
    t0 = float(ts[int(np.argmax(drive_sample(d, ts)))])
    base = float(drive_phase_integral(d, t0))
    w = 2.0 * math.pi / period

    def mean_exp(m: int) -> complex:
        s = np.arange(m) * (period / m)
        eta = (np.asarray(drive_phase_integral(d, t0 + s)) - base) / HBAR
        return complex(np.exp(1j * (eta - k * w * s)).mean())

    coarse = mean_exp(2048)
    fine = mean_exp(4096)
    # Richardson step: removes the h^2 error left by kinked drives
    return fine + (fine - coarse) / 3.0


def fourier_gap(p: TlsParams, d: Drive, k: int) -> FourierGap:
    """Gap amplitude Delta_k of the k-th photon sideband.

    Delta_k = Delta (omega / 2 pi) integral over one period of
    exp[(i/hbar) integral of the drive - i k omega t], evaluated by the
    trapezoid rule on 4096 points with a Richardson check against 2048.
    The phase integral itself uses the exact closed form of each drive
    kind.  For a cosine drive this reduces to Delta J_k(A / hbar omega).
    """
    if int(k) != k:
        raise ValueError("photon index must be an integer")
    return FourierGap(k=int(k), delta_k=p.delta * _gap_integral(d, int(k)))


# ---------------------------------------------------------------------------
# stationary averages


def rwa_average(
    p: TlsParams, d: Drive, diss: DissipationParams, k_range: KRange
) -> float:
    """Stationary upper-level occupation from the rotating-wave Bloch solution.

    P = (1/2) sum over k of Omega_k^2 / (Omega_k^2
        + (Gamma1/Gamma2)(k omega - |eps0|/hbar)^2 + Gamma1 Gamma2)
    with Omega_k = |Delta_k| / hbar.
    """
    if diss.gamma1 <= 0.0 or diss.gamma2 <= 0.0:
        raise ValueError("the stationary average needs positive rates")
    period = drive_period(d)
    w = 2.0 * math.pi / period
    ratio = diss.gamma1 / diss.gamma2
    floor = diss.gamma1 * diss.gamma2
    total = 0.0
    for k in k_range.indices(p.eps0, w):
        om = abs(fourier_gap(p, d, k).delta_k) / HBAR
        det = k * w - abs(p.eps0) / HBAR
        total += om * om / (om * om + ratio * det * det + floor)
    return 0.5 * total


def multiphoton_rabi(p: TlsParams, d: Drive, k: int, t):
    """Occupation P_up(t) of k-photon Rabi oscillations near resonance.

    P(t) = P_bar (1 - cos Omega t) with Omega = sqrt(Omega_k0^2 + detun^2),
    Omega_k0 = (Delta/hbar) J_k(A / hbar omega) and detun = k omega
    - |eps0|/hbar.  Valid for a fast-passage cosine drive near the k-th
    resonance.
    """
    _require_cosine(d)
    if int(k) != k or k < 0:
        raise ValueError("photon index must be a nonnegative integer")
    om0 = (p.delta / HBAR) * _bessel_j(int(k), d.A / (HBAR * d.omega))
    det = k * d.omega - abs(p.eps0) / HBAR
    om2 = om0 * om0 + det * det
    if om2 == 0.0:
        return 0.0 if np.ndim(t) == 0 else np.zeros(np.shape(t))
    pbar = 0.5 * om0 * om0 / om2
    val = pbar * (1.0 - np.cos(math.sqrt(om2) * np.asarray(t)))
    return float(val) if np.ndim(t) == 0 else val


def weak_drive_rabi(p: TlsParams, A: float, omega: float) -> tuple[float, float]:
    """Rabi frequency and averaged occupation for weak near-resonant driving.

    Returns (Omega_R0, P_bar) with Omega_R0 = A Delta / (2 hbar DeltaE) and
    P_bar the lorentzian 0.5 Omega_R0^2 / (Omega_R0^2 + detun^2), where the
    detuning is omega - DeltaE/hbar.
    """
    if A < 0.0 or omega <= 0.0:
        raise ValueError("need A >= 0 and omega > 0")
    gap = math.hypot(p.delta, p.eps0)
    om0 = A * p.delta / (2.0 * HBAR * gap)
    det = omega - gap / HBAR
    if om0 == 0.0 and det == 0.0:
        return 0.0, 0.0
    return om0, 0.5 * om0 * om0 / (om0 * om0 + det * det)


def double_passage_asymptote(p: TlsParams, d: Drive, eps0: float) -> float:
    """Upper-level occupation after one period of a fast-passage cosine drive.

    Leading order in eps0/A:
    P = (2 pi / hbar omega)(Delta^2 / A) sin^2(A/hbar omega
        - (pi/2)(eps0/hbar omega) - pi/4).
    The offset is taken from the ``eps0`` argument so sweeps can reuse one
    parameter set.
    """
    _require_cosine(d)
    if d.A <= 0.0:
        raise ValueError("the asymptote needs a positive amplitude")
    hw = HBAR * d.omega
    phase = d.A / hw - 0.5 * math.pi * eps0 / hw - 0.25 * math.pi
    return (2.0 * math.pi / hw) * (p.delta**2 / d.A) * math.sin(phase) ** 2


# ---------------------------------------------------------------------------
# Floquet


def _floquet_matrix(p: TlsParams, d: Drive, n_blocks: int) -> np.ndarray:
    dim = 2 * (2 * n_blocks + 1)
    hw = HBAR * d.omega
    h0 = -0.5 * np.array([[p.eps0, p.delta], [p.delta, -p.eps0]])
    coup = 0.25 * d.A * np.array([[1.0, 0.0], [0.0, -1.0]])
    if d.phase == 0.0:
        mat = np.zeros((dim, dim))
        up = coup
    else:
        mat = np.zeros((dim, dim), dtype=complex)
        up = coup * cmath.exp(1j * d.phase)
    for i, nblk in enumerate(range(-n_blocks, n_blocks + 1)):
        r = 2 * i
        mat[r : r + 2, r : r + 2] = h0 + nblk * hw * np.eye(2)
        if i + 1 <= 2 * n_blocks:
            mat[r : r + 2, r + 2 : r + 4] = up
            mat[r + 2 : r + 4, r : r + 2] = up.conj().T
    return mat


def _fold(vals: np.ndarray, omega: float) -> np.ndarray:
    hw = HBAR * omega
    return np.mod(vals + 0.5 * hw, hw) - 0.5 * hw


def floquet_quasienergies(fs: FloquetSpec) -> QuasiEnergies:
    """Quasienergies and Fourier-mode eigenvectors of the cosine Floquet matrix.

    The block-tridiagonal matrix with diagonal blocks H0 + n hbar omega and
    coupling (A/4) sigma_z is diagonalized at the requested truncation and
    again five blocks larger; the truncation grows until the central pair of
    quasienergies moves by less than 1e-8 between the two sizes.
    """
    _require_cosine(fs.drive)
    p, d = fs.params, fs.drive

    def central(vals: np.ndarray) -> np.ndarray:
        m = len(vals) // 2
        return vals[m - 1 : m + 1]

    n = fs.n_max
    vals = np.linalg.eigvalsh(_floquet_matrix(p, d, n))
    while True:
        bigger = np.linalg.eigh(_floquet_matrix(p, d, n + 5))
        if np.max(np.abs(central(bigger.eigenvalues) - central(vals))) < 1e-8:
            break
        n += 5
        vals = bigger.eigenvalues
        if n > fs.n_max + 60:
            raise InsufficientTruncation(
                "quasienergies kept moving after growing the Floquet matrix "
                f"to {n} blocks"
            )
    n_final = n + 5
    vecs = bigger.eigenvectors
    dim = 2 * (2 * n_final + 1)
    vectors = np.transpose(vecs).reshape(dim, 2 * n_final + 1, 2)
    return QuasiEnergies(
        eps_j=_fold(bigger.eigenvalues, d.omega),
        vectors=vectors,
        raw=bigger.eigenvalues,
        omega=d.omega,
        n_max=n_final,
    )


def floquet_average(fs: FloquetSpec, init: int = 0) -> float:
    """Time-averaged occupation of the other diabatic level.

    Starting from diabatic state ``init`` in the central Fourier mode, the
    average over time of the occupation of state 1 - init is
    sum over eigenvectors j of |<init_0|e_j>|^2 sum over modes m of
    |<target_m|e_j>|^2.
    """
    if init not in (0, 1):
        raise ValueError("init must be the diabatic index 0 or 1")
    qe = floquet_quasienergies(fs)
    center = qe.n_max
    target = 1 - init
    weight_init = np.abs(qe.vectors[:, center, init]) ** 2
    weight_target = np.sum(np.abs(qe.vectors[:, :, target]) ** 2, axis=1)
    return float(np.dot(weight_init, weight_target))


# ---------------------------------------------------------------------------
# van Vleck corrections


def _signed_j(row: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """J_m from a row of nonnegative orders, with J_{-m} = (-1)^m J_m."""
    vals = row[np.abs(orders)]
    return np.where((orders < 0) & (np.abs(orders) % 2 == 1), -vals, vals)


def gvvpt_shift(p: TlsParams, d: Drive, k: int) -> tuple[float, float]:
    """Resonance shift and corrected gap of the k-photon coupling channel.

    Returns (delta_k, Delta_tilde_k): the level shift
    delta_k = (Delta^2 / 2) sum over l != -k of J_l^2 / (eps0 + l hbar omega)
    and the gap through third order in Delta.  The corrected resonance
    center sits at eps0 = k hbar omega - delta_k.
    """
    _require_cosine(d)
    if int(k) != k:
        raise ValueError("photon index must be an integer")
    k = int(k)
    hw = HBAR * d.omega
    x = d.A / hw
    half = int(math.ceil(x)) + 25 + abs(k)
    row = _bessel_j_row(x, 2 * half + abs(k))
    orders = np.array([m for m in range(-half, half + 1) if m != -k])
    jvals = _signed_j(row, orders)
    j_gap = float(_signed_j(row, np.array([-k]))[0])
    dens = p.eps0 + orders * hw
    if np.min(np.abs(dens)) < 1e-12 * hw:
        raise ValueError("offset sits on another resonance channel")
    shift = 0.5 * p.delta**2 * float(np.sum(jvals * jvals / dens))
    # third-order correction to the gap
    u = jvals / dens
    cross = _signed_j(row, orders[:, None] + orders[None, :] + k)
    s1 = float(u @ cross @ u)
    s2 = j_gap * float(np.sum(jvals * jvals / (dens * dens)))
    delta_tilde = -p.delta * j_gap + 0.25 * p.delta**3 * (s1 + s2)
    return shift, delta_tilde


def gvvpt_resonance(p: TlsParams, d: Drive, k: int) -> float:
    """Self-consistent center of the k-th resonance, eps0 = k hbar omega - delta_k."""
    _require_cosine(d)
    hw = HBAR * d.omega
    eps = k * hw
    for _ in range(80):
        shift, _ = gvvpt_shift(TlsParams(delta=p.delta, eps0=eps), d, k)
        nxt = k * hw - shift
        if abs(nxt - eps) < 1e-12 * max(hw, abs(nxt)):
            return nxt
        eps = nxt
    raise RootNotFound("resonance-center iteration did not settle")


# ---------------------------------------------------------------------------
# rate equation


def rate_W(p: TlsParams, d: Drive, gamma2: float, n: int | None = None) -> float:
    """White-noise transition rate between the diabatic states.

    W = (1/2) sum over n of Gamma2 (Delta_n/hbar)^2
        / ((eps0/hbar - n omega)^2 + Gamma2^2)
    with Delta_n = Delta J_n(A / hbar omega).  Passing ``n`` keeps a single
    resonance term.  A warning flags W > Gamma2, where the perturbative
    treatment degrades.
    """
    _require_cosine(d)
    if gamma2 <= 0.0:
        raise ValueError("gamma2 must be positive")
    hw = HBAR * d.omega
    x = d.A / hw

    def term(m: int) -> float:
        g = p.delta * _bessel_j(m, x) / HBAR
        det = p.eps0 / HBAR - m * d.omega
        return 0.5 * gamma2 * g * g / (det * det + gamma2 * gamma2)

    if n is not None:
        if int(n) != n:
            raise ValueError("photon index must be an integer")
        total = term(int(n))
    else:
        reach = int(math.ceil(x)) + 10
        center = round(p.eps0 / hw)
        lo = min(-reach, center - 10)
        hi = max(reach, center + 10)
        row = _bessel_j_row(x, max(abs(lo), abs(hi)))
        total = 0.0
        for m in range(lo, hi + 1):
            g = p.delta * row[abs(m)] / HBAR
            det = p.eps0 / HBAR - m * d.omega
            total += 0.5 * gamma2 * g * g / (det * det + gamma2 * gamma2)
    if total > gamma2:
        warnings.warn(
            "transition rate exceeds the decoherence rate; the perturbative "
            "rate treatment is marginal here",
            stacklevel=2,
        )
    return total


def rate_occupation(W: float, gamma1: float) -> float:
    """Stationary occupation W / (2W + Gamma1) of the rate equation."""
    if W < 0.0 or gamma1 < 0.0:
        raise ValueError("rates must be nonnegative")
    if W == 0.0:
        return 0.0
    return W / (2.0 * W + gamma1)


# ---------------------------------------------------------------------------
# quantized drive


def quantum_rabi(g_tilde: float, n: int, k: int, delta: float) -> float:
    """k-photon Rabi frequency for a quantized driving field.

    Omega = (Delta/hbar)(2 g)^k exp(-2 g^2) sqrt(n!/(n+k)!) L_n^k(2 g^2)
    with g the coupling in units of the photon energy and n the photon
    number.  For small g and large n this approaches the semiclassical
    Bessel value.
    """
    if g_tilde < 0.0 or not math.isfinite(g_tilde):
        raise ValueError("coupling must be nonnegative and finite")
    if int(n) != n or n < 0 or int(k) != k or k < 0:
        raise ValueError("photon numbers must be nonnegative integers")
    z = 2.0 * g_tilde * g_tilde
    ratio = math.exp(0.5 * (math.lgamma(n + 1.0) - math.lgamma(n + k + 1.0)))
    return (delta / HBAR) * (2.0 * g_tilde) ** k * math.exp(-z) * ratio * _laguerre(
        int(n), int(k), z
    )

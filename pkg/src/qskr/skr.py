"""Devetak-Winter secret key rate under reverse reconciliation.

``K = beta * C - chi_BE`` where ``C`` is the hybrid-noise capacity bound and
``chi_BE`` is the Holevo bound obtained from the symplectic eigenvalues of the
Alice-Bob covariance matrix and of Eve's state conditioned on Bob's homodyne
outcome. Noise quantities are in shot-noise units; rates in bits per use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atmosphere import BeamGeometry, beam_wandering_params, sample_transmissions
from .noise_channel import ChannelUse, HybridNoiseParams, TransmittedSignal, channel_capacity

DISCRIMINANT_TOL = 1e-12
# below this transmission every term of the key rate has reached its T -> 0 limit in double precision
T_EVAL_FLOOR = 1e-100


class UnphysicalParameters(ValueError):
    """The covariance matrices have no real symplectic spectrum."""


@dataclass(frozen=True)
class DetectorParams:
    eta: float = 0.606
    nu_ele: float = 0.041
    epsilon: float = 0.005
    beta: float = 0.95

    def __post_init__(self):
        if not (0 < self.eta <= 1):
            raise ValueError(f"eta out of (0,1]: {self.eta}")
        if not (self.nu_ele >= 0):
            raise ValueError(f"nu_ele must be >= 0: {self.nu_ele}")
        if not (self.epsilon >= 0):
            raise ValueError(f"epsilon must be >= 0: {self.epsilon}")
        if not (0 < self.beta <= 1):
            raise ValueError(f"beta out of (0,1]: {self.beta}")


@dataclass(frozen=True)
class NoiseReferral:
    chi_line: float
    chi_hom: float
    chi_tot: float


def noise_referral(t: float, d: DetectorParams) -> NoiseReferral:
    """Channel, detector and total noise referred to the channel input."""
    if not (0 < t <= 1):
        raise ValueError(f"T must be in (0, 1], got {t}")
    chi_line = 1.0 / t - 1.0 + d.epsilon
    chi_hom = (1.0 + d.nu_ele) / d.eta - 1.0
    return NoiseReferral(chi_line, chi_hom, chi_line + chi_hom / t)


def g_von_neumann(x: float) -> float:
    """Entropy (bits) of a thermal mode with mean photon number ``x``."""
    if x < 0:
        raise ValueError(f"G(x) needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    if x < 1.0:
        return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)
    # same expression rearranged to avoid the cancellation at large x
    return math.log2(x + 1.0) + x * math.log1p(1.0 / x) / math.log(2.0)


@dataclass(frozen=True)
class SymplecticSpectrum:
    l1: float
    l2: float
    l3: float
    l4: float
    l5: float = 1.0
    # intermediate invariants, kept for checks
    a: float = math.nan
    b: float = math.nan
    c: float = math.nan
    d: float = math.nan

    def values(self) -> tuple[float, float, float, float, float]:
        return (self.l1, self.l2, self.l3, self.l4, self.l5)


def _pair(s: float, p: float, label: str) -> tuple[float, float]:
    """Roots of x^2 - s x + p, returned as square roots (eigenvalues, not their squares)."""
    disc = s * s - 4.0 * p
    if disc < 0:
        if disc < -DISCRIMINANT_TOL:
            raise UnphysicalParameters(f"{label} discriminant {disc:.3e} < 0")
        disc = 0.0
    root = math.sqrt(disc)
    hi = 0.5 * (s + root)
    # Vieta keeps the small root accurate when s^2 >> 4p
    lo = p / hi if hi > 0 else 0.5 * (s - root)
    if lo < 0:
        raise UnphysicalParameters(f"{label} has a negative squared eigenvalue {lo:.3e}")
    return math.sqrt(hi), math.sqrt(lo)


def symplectic_spectrum(
    sigma_x2: float, t: float, nr: NoiseReferral, printed: bool = False
) -> SymplecticSpectrum:
    """Symplectic eigenvalues for modulation variance ``sigma_x2`` at transmission ``t``.

    By default the entanglement-based variance ``V = sigma_x2 + 1`` is used and
    the first term of ``A`` carries ``V**2``. ``printed=True`` substitutes
    ``sigma_x2`` literally for every variance slot instead; that form goes
    unphysical for ``sigma_x2 < 1`` at unit transmission.
    """
    if not sigma_x2 > 0:
        raise ValueError("sigma_x2 must be > 0")
    if printed:
        v, v_first = sigma_x2, sigma_x2
    else:
        v = sigma_x2 + 1.0
        v_first = v * v
    cl, ch, ct = nr.chi_line, nr.chi_hom, nr.chi_tot
    a = v_first * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + cl) ** 2
    b = t * t * (v * cl + 1.0) ** 2
    sb = math.sqrt(b)
    denom = t * (v + ct)
    c = (v * sb + t * (v + cl) + a * ch) / denom
    d = sb * (v + sb * ch) / denom
    l1, l2 = _pair(a, b, "Alice-Bob")
    l3, l4 = _pair(c, d, "conditional")
    return SymplecticSpectrum(l1, l2, l3, l4, 1.0, a, b, c, d)


def _g_of_eig(lam: float) -> float:
    # eigenvalues a hair below 1 come from rounding
    return g_von_neumann(max(0.5 * (lam - 1.0), 0.0))


def holevo_chi_be(s: SymplecticSpectrum) -> float:
    """Eve's Holevo information about Bob's data, bits."""
    return _g_of_eig(s.l1) + _g_of_eig(s.l2) - _g_of_eig(s.l3) - _g_of_eig(s.l4)


@dataclass(frozen=True)
class SkrBreakdown:
    capacity: float
    i_ab: float
    chi_be: float
    skr: float
    spectrum: SymplecticSpectrum

    @property
    def secure(self) -> bool:
        return self.skr > 0


def secret_key_rate(
    sig: TransmittedSignal,
    ch: ChannelUse,
    noise: HybridNoiseParams,
    d: DetectorParams,
    printed: bool = False,
) -> SkrBreakdown:
    """Key rate at fixed transmission. Negative rates are returned as-is."""
    capacity = channel_capacity(sig, ch, noise)
    t = ch.transmission_t
    spectrum = symplectic_spectrum(sig.var_x, t, noise_referral(t, d), printed=printed)
    chi_be = holevo_chi_be(spectrum)
    i_ab = d.beta * capacity
    return SkrBreakdown(capacity, i_ab, chi_be, i_ab - chi_be, spectrum)


@dataclass(frozen=True)
class FadingEstimate:
    capacity: float
    i_ab: float
    chi_be: float
    skr: float
    skr_std_error: float
    n_draws: int


def fading_average(
    sig: TransmittedSignal,
    noise: HybridNoiseParams,
    d: DetectorParams,
    g: BeamGeometry,
    n_draws: int,
    seed: int,
    printed: bool = False,
) -> FadingEstimate:
    """Average of the fixed-T key rate over beam-wandering transmission draws."""
    if n_draws < 100:
        raise ValueError("n_draws must be at least 100")
    if g.pointing_sigma_r == 0:
        bw = beam_wandering_params(g)
        r = secret_key_rate(sig, ChannelUse(bw.t0), noise, d, printed)
        return FadingEstimate(r.capacity, r.i_ab, r.chi_be, r.skr, 0.0, n_draws)
    ts = sample_transmissions(g, n_draws, seed)
    rows = np.empty((n_draws, 3))
    cache: dict[float, tuple[float, float, float]] = {}
    for i, t in enumerate(ts):
        t = max(float(t), T_EVAL_FLOOR)
        if t not in cache:
            r = secret_key_rate(sig, ChannelUse(t), noise, d, printed)
            cache[t] = (r.capacity, r.chi_be, r.skr)
        rows[i] = cache[t]
    cap, chi, skr = rows.mean(axis=0)
    se = float(rows[:, 2].std(ddof=1) / math.sqrt(n_draws))
    return FadingEstimate(float(cap), d.beta * float(cap), float(chi), float(skr), se, n_draws)


def fading_average_skr(
    sig: TransmittedSignal,
    noise: HybridNoiseParams,
    d: DetectorParams,
    g: BeamGeometry,
    n_draws: int,
    seed: int,
) -> float:
    return fading_average(sig, noise, d, g, n_draws, seed).skr

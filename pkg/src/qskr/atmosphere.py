"""Free-space transmittance models.

Beam wandering: the beam centre is displaced from the aperture centre by a
Rayleigh-distributed distance ``r`` (pointing jitter ``sigma_r``), and the
transmission coefficient follows ``T = T0 exp(-(r/R1)**kappa1 / 2)``. A plain
log-normal transmittance density is provided as an alternative model.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

_SERIES_LIMIT = 15.0
T0_CEILING = 1.0 - 1e-12


# -- modified Bessel functions of the first kind, orders 0 and 1 ----------------

def _bessel_series(nu: int, x: float) -> float:
    half = 0.5 * x
    term = half**nu / math.factorial(nu)
    total = term
    k = 0
    q = half * half
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if term <= 1e-17 * total:
            return total


def _bessel_asymptotic_scaled(nu: int, x: float) -> float:
    """e^{-x} I_nu(x) from the large-argument expansion (x >= 15)."""
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-17:
            break
        term = nxt
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_ie(nu: int, x: float) -> float:
    """Exponentially scaled ``e^{-|x|} I_nu(x)`` for nu in {0, 1}."""
    if nu not in (0, 1):
        raise ValueError("only orders 0 and 1 are implemented")
    ax = abs(x)
    if ax < _SERIES_LIMIT:
        val = math.exp(-ax) * _bessel_series(nu, ax)
    else:
        val = _bessel_asymptotic_scaled(nu, ax)
    return -val if (nu == 1 and x < 0) else val


def bessel_i0(x: float) -> float:
    ax = abs(x)
    return _bessel_series(0, ax) if ax < _SERIES_LIMIT else math.exp(ax) * bessel_ie(0, ax)


def bessel_i1(x: float) -> float:
    ax = abs(x)
    val = _bessel_series(1, ax) if ax < _SERIES_LIMIT else math.exp(ax) * bessel_ie(1, ax)
    return -val if x < 0 else val


# -- beam wandering ----------------------------------------------------------

@dataclass(frozen=True)
class BeamGeometry:
    """Aperture radius ``aperture_a``, beam size ``beam_w`` and pointing jitter, all in metres."""

    aperture_a: float
    beam_w: float
    pointing_sigma_r: float

    def __post_init__(self):
        if not (self.aperture_a > 0 and self.beam_w > 0):
            raise ValueError("aperture_a and beam_w must be > 0")
        if not (self.pointing_sigma_r >= 0):
            raise ValueError("pointing_sigma_r must be >= 0")


@dataclass(frozen=True)
class BeamWanderingParams:
    t0: float
    kappa1: float
    r1: float


def beam_wandering_params(g: BeamGeometry) -> BeamWanderingParams:
    """Maximal transmission ``T0`` and the shape/scale pair ``(kappa1, R1)``."""
    x = 4.0 * g.aperture_a**2 / g.beam_w**2
    t0_sq = -math.expm1(-0.5 * x)
    denom = 1.0 - bessel_ie(0, x)
    log_term = math.log(2.0 * t0_sq / denom)
    kappa1 = 2.0 * x * bessel_ie(1, x) / denom / log_term
    r1 = g.aperture_a * log_term ** (-1.0 / kappa1)
    t0 = math.sqrt(t0_sq)
    if t0 >= T0_CEILING:
        warnings.warn(f"T0={t0!r} clamped to {T0_CEILING!r}", RuntimeWarning, stacklevel=2)
        t0 = T0_CEILING
    return BeamWanderingParams(t0, kappa1, r1)


def transmission_of_offset(r, bw: BeamWanderingParams):
    return bw.t0 * np.exp(-0.5 * (np.asarray(r) / bw.r1) ** bw.kappa1)


def _offset_of_transmission(t, bw: BeamWanderingParams):
    return bw.r1 * (2.0 * np.log(bw.t0 / t)) ** (1.0 / bw.kappa1)


def pdtc_pdf(t, g: BeamGeometry):
    """Density of the transmission coefficient on ``(0, T0)``.

    Obtained by pushing the Rayleigh pointing density through ``T(r)``.
    """
    if not g.pointing_sigma_r > 0:
        raise ValueError("pdtc_pdf needs pointing_sigma_r > 0; with no jitter T = T0")
    bw = beam_wandering_params(g)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t >= bw.t0):
        raise ValueError(f"t must lie in (0, T0={bw.t0:.12g})")
    s2 = g.pointing_sigma_r**2
    k = bw.kappa1
    log_t = np.log(t)
    # u = 2 ln(T0/t); near T0 the difference t - T0 is exact, so log1p keeps u accurate there
    near = t > 0.5 * bw.t0
    u = 2.0 * np.where(
        near, -np.log1p((np.where(near, t, bw.t0) - bw.t0) / bw.t0), math.log(bw.t0) - log_t
    )
    log_dens = (
        math.log(2.0 * bw.r1**2 / (s2 * k))
        - log_t
        + (2.0 / k - 1.0) * np.log(u)
        - (bw.r1**2 / (2.0 * s2)) * u ** (2.0 / k)
    )
    dens = np.exp(log_dens)
    return float(dens) if dens.ndim == 0 else dens


def pdtc_cdf(t, g: BeamGeometry):
    """P(T <= t). Equals P(r >= r(t)) = exp(-r(t)^2 / (2 sigma_r^2))."""
    bw = beam_wandering_params(g)
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    inside = t < bw.t0
    if g.pointing_sigma_r == 0:
        out[inside] = 0.0
    else:
        ti = np.clip(t[inside], 1e-300, None)
        r = _offset_of_transmission(ti, bw)
        out[inside] = np.where(t[inside] > 0, np.exp(-(r**2) / (2.0 * g.pointing_sigma_r**2)), 0.0)
    return float(out) if out.ndim == 0 else out


def sample_transmissions(g: BeamGeometry, n: int, seed: int) -> np.ndarray:
    """``n`` transmission draws; deterministic given ``seed``."""
    bw = beam_wandering_params(g)
    if g.pointing_sigma_r == 0:
        return np.full(n, bw.t0)
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # (0, 1]
    r = g.pointing_sigma_r * np.sqrt(-2.0 * np.log(u))
    # steep profiles (large kappa1) underflow far out in the tail; keep T > 0
    return np.maximum(transmission_of_offset(r, bw), np.finfo(float).tiny)


def sample_transmission(g: BeamGeometry, seed: int) -> float:
    return float(sample_transmissions(g, 1, seed)[0])


def mean_tau(g: BeamGeometry) -> float:
    """E[T^2] under beam wandering, by quadrature over the scaled offset r/sigma_r."""
    bw = beam_wandering_params(g)
    if g.pointing_sigma_r == 0:
        return bw.t0**2
    ratio = g.pointing_sigma_r / bw.r1

    def integrand(s):
        return math.exp(-((ratio * s) ** bw.kappa1)) * s * math.exp(-0.5 * s * s)

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)
    return bw.t0**2 * val


# -- altitude profile --------------------------------------------------------

@dataclass(frozen=True)
class LinkProfile:
    """Downlink optics. Defaults are typical LEO values, not measured ones."""

    altitude_h: float  # km
    waist_w0: float = 0.15  # m
    wavelength: float = 810e-9  # m
    pointing_angle: float = 1e-6  # rad
    aperture_a: float = 0.5  # m

    def __post_init__(self):
        if not (self.altitude_h > 0 and self.waist_w0 > 0 and self.wavelength > 0 and self.aperture_a > 0):
            raise ValueError("altitude, waist, wavelength and aperture must be > 0")
        if not self.pointing_angle >= 0:
            raise ValueError("pointing_angle must be >= 0")


def geometry_at_altitude(p: LinkProfile) -> BeamGeometry:
    h = p.altitude_h * 1e3
    z_r = math.pi * p.waist_w0**2 / p.wavelength
    w = p.waist_w0 * math.sqrt(1.0 + (h / z_r) ** 2)
    return BeamGeometry(p.aperture_a, w, p.pointing_angle * h)


def altitude_to_tau(p: LinkProfile) -> float:
    """Mean transmission efficiency E[T^2] for a link at altitude ``p.altitude_h``."""
    return mean_tau(geometry_at_altitude(p))


# -- log-normal model --------------------------------------------------------

@dataclass(frozen=True)
class TurbulenceParams:
    sigma_ln: float
    tau_tilde: float

    def __post_init__(self):
        if not self.sigma_ln > 0:
            raise ValueError("sigma_ln must be > 0")
        if not (0 < self.tau_tilde <= 1):
            raise ValueError("tau_tilde must be in (0, 1]")


def lognormal_pdtc_pdf(tau, t: TurbulenceParams):
    """Log-normal transmittance density; ``ln tau ~ N(-ln tau_tilde, sigma_ln^2)``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0) or not np.all(np.isfinite(tau)):
        raise ValueError("tau must be positive and finite")
    z = (np.log(tau) + math.log(t.tau_tilde)) / t.sigma_ln
    dens = np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * t.sigma_ln * tau)
    return float(dens) if dens.ndim == 0 else dens


def sample_lognormal_tau(t: TurbulenceParams, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.exp(-math.log(t.tau_tilde) + t.sigma_ln * rng.standard_normal(n))

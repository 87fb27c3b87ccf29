"""Hybrid Poisson + Gaussian noise, the received-signal mixture and the
capacity bound ``C = U_Y - L_Z`` for one fixed-transmission channel use.

All variances are in shot-noise units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import gammaln, pdtrc

from .gmm import GaussianMixture, convolve_gaussian, entropy_lower_bound, entropy_upper_bound

TAIL_MASS_LIMIT = 1e-12


def default_truncation(lam: float) -> int:
    return int(math.ceil(lam + 10.0 * math.sqrt(lam) + 20.0))


def poisson_tail_mass(lam: float, r: int) -> float:
    """P(J > r) for J ~ Poisson(lam)."""
    if lam == 0:
        return 0.0
    return float(pdtrc(r, lam))


@dataclass(frozen=True)
class HybridNoiseParams:
    """Poisson intensity ``lam`` plus the Gaussian part N(mu_thermal, var_thermal).

    ``truncation_r`` is the last Poisson index kept; ``None`` picks
    ``ceil(lam + 10 sqrt(lam) + 20)``.
    """

    lam: float = 2.0
    mu_thermal: float = 0.0
    var_thermal: float = 0.25
    truncation_r: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if not math.isfinite(self.mu_thermal):
            raise ValueError("mu_thermal must be finite")
        if not (math.isfinite(self.var_thermal) and self.var_thermal > 0):
            raise ValueError(f"var_thermal must be > 0, got {self.var_thermal}")
        if self.truncation_r is None:
            object.__setattr__(self, "truncation_r", default_truncation(self.lam))
        r = int(self.truncation_r)
        if r != self.truncation_r or r < 0:
            raise ValueError(f"truncation_r must be a non-negative integer, got {self.truncation_r}")
        tail = poisson_tail_mass(self.lam, r)
        if tail >= TAIL_MASS_LIMIT:
            raise ValueError(
                f"truncation_r={r} leaves Poisson tail mass {tail:.3e} >= {TAIL_MASS_LIMIT:g} "
                f"for lambda={self.lam}; use at least {default_truncation(self.lam)}"
            )


@dataclass(frozen=True)
class TransmittedSignal:
    var_x: float
    mu_x: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.var_x) and self.var_x > 0):
            raise ValueError(f"var_x must be > 0, got {self.var_x}")
        if not math.isfinite(self.mu_x):
            raise ValueError("mu_x must be finite")


@dataclass(frozen=True)
class ChannelUse:
    transmission_t: float

    def __post_init__(self):
        if not (0 < self.transmission_t <= 1):
            raise ValueError(f"transmission T must be in (0, 1], got {self.transmission_t}")

    @property
    def tau(self) -> float:
        return self.transmission_t**2


def poisson_weights(lam: float, r: int) -> np.ndarray:
    """Unnormalized Poisson pmf for j = 0..r."""
    if lam == 0:
        return np.array([1.0])
    j = np.arange(r + 1)
    return np.exp(-lam + j * math.log(lam) - gammaln(j + 1))


@lru_cache(maxsize=256)
def hybrid_noise_mixture(p: HybridNoiseParams) -> GaussianMixture:
    """Poisson-weighted mixture: component j is N(mu_thermal + j, var_thermal)."""
    w = poisson_weights(p.lam, p.truncation_r)
    j = np.arange(w.size)
    return GaussianMixture(w, p.mu_thermal + j, np.full(w.size, p.var_thermal))


def received_signal_mixture(
    sig: TransmittedSignal, ch: ChannelUse, noise: HybridNoiseParams
) -> GaussianMixture:
    """Density of ``Y = T X + Z``; component j is N(T mu_x + mu_thermal + j, T^2 var_x + var_thermal)."""
    t = ch.transmission_t
    return convolve_gaussian(hybrid_noise_mixture(noise), t * sig.mu_x, t * t * sig.var_x)


@lru_cache(maxsize=256)
def _noise_entropy_lower(noise: HybridNoiseParams) -> float:
    return entropy_lower_bound(hybrid_noise_mixture(noise))


def channel_capacity(sig: TransmittedSignal, ch: ChannelUse, noise: HybridNoiseParams) -> float:
    """Upper bound ``U_Y - L_Z`` on the mutual information, bits per channel use."""
    upper_y = entropy_upper_bound(received_signal_mixture(sig, ch, noise))
    return upper_y - _noise_entropy_lower(noise)


def snr_of(sig: TransmittedSignal, ch: ChannelUse, noise: HybridNoiseParams) -> float:
    """Received signal power over total noise variance (Poisson ``lam`` + thermal)."""
    return ch.tau * sig.var_x / (noise.lam + noise.var_thermal)


def snr_db(sig: TransmittedSignal, ch: ChannelUse, noise: HybridNoiseParams) -> float:
    return 10.0 * math.log10(snr_of(sig, ch, noise))


def var_x_for_snr_db(snr_db_value: float, t: float, noise: HybridNoiseParams) -> float:
    """Inverse of :func:`snr_db` in the modulation variance."""
    return 10.0 ** (snr_db_value / 10.0) * (noise.lam + noise.var_thermal) / (t * t)

"""One-dimensional finite Gaussian mixtures.

Everything in the library (noise, transmitted signal, received signal) is
carried as a :class:`GaussianMixture`. Entropies are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

LOG2E = 1.0 / math.log(2.0)
MIN_VARIANCE = 1e-12
_MC_CHUNK = 1 << 16


class GaussianComponent(NamedTuple):
    mean: float
    variance: float


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Weighted sum of 1-D Gaussian densities.

    Weights are renormalized to sum to one on construction. Arrays are stored
    read-only, so a mixture can be shared freely between threads.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        m = np.array(self.means, dtype=float).ravel()
        v = np.array(self.variances, dtype=float).ravel()
        if w.size == 0:
            raise ValueError("mixture needs at least one component")
        if not (w.size == m.size == v.size):
            raise ValueError(
                f"length mismatch: {w.size} weights, {m.size} means, {v.size} variances"
            )
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights sum to zero")
        if not np.all(np.isfinite(m)):
            raise ValueError("means must be finite")
        if not np.all(np.isfinite(v)) or np.any(v < MIN_VARIANCE):
            raise ValueError(f"variances must be finite and >= {MIN_VARIANCE:g}")
        w = w / total
        for arr in (w, m, v):
            arr.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "variances", v)

    @classmethod
    def single(cls, mean: float, variance: float) -> "GaussianMixture":
        return cls([1.0], [mean], [variance])

    @classmethod
    def from_components(cls, weights, components) -> "GaussianMixture":
        comps = [GaussianComponent(*c) for c in components]
        return cls(weights, [c.mean for c in comps], [c.variance for c in comps])

    @property
    def components(self) -> list[GaussianComponent]:
        return [GaussianComponent(float(m), float(v)) for m, v in zip(self.means, self.variances)]

    def __len__(self) -> int:
        return self.weights.size

    def mean(self) -> float:
        return float(np.dot(self.weights, self.means))

    def variance(self) -> float:
        # law of total variance
        mu = self.mean()
        return float(np.dot(self.weights, self.variances + (self.means - mu) ** 2))

    def log_weights(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.weights)


def _log_normal_pdf(x, mean, variance):
    return -0.5 * np.log(2.0 * np.pi * variance) - (x - mean) ** 2 / (2.0 * variance)


def log_pdf_eval(mix: GaussianMixture, x):
    """Natural log of the mixture density, via log-sum-exp over components."""
    x = np.asarray(x, dtype=float)
    terms = mix.log_weights() + _log_normal_pdf(x[..., None], mix.means, mix.variances)
    # max-shifted sum; scipy's logsumexp does the same with several times the overhead
    top = terms.max(axis=-1)
    return top + np.log(np.exp(terms - top[..., None]).sum(axis=-1))


def pdf_eval(mix: GaussianMixture, x):
    """Mixture density at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("pdf_eval needs finite x")
    out = np.exp(log_pdf_eval(mix, x))
    return float(out) if out.ndim == 0 else out


def affine_map(mix: GaussianMixture, scale: float, shift: float = 0.0) -> GaussianMixture:
    """Density of ``scale * X + shift`` for ``X ~ mix``."""
    if scale == 0:
        raise ValueError("scale must be non-zero")
    return GaussianMixture(mix.weights, scale * mix.means + shift, scale**2 * mix.variances)


def convolve_gaussian(mix: GaussianMixture, mean: float, variance: float) -> GaussianMixture:
    """Density of ``X + G`` with ``G ~ N(mean, variance)`` independent of ``X``."""
    if not variance > 0:
        raise ValueError("convolution needs a Gaussian with positive variance")
    return GaussianMixture(mix.weights, mix.means + mean, mix.variances + variance)


def entropy_lower_bound(mix: GaussianMixture) -> float:
    w = mix.weights
    keep = w > 0
    lw = np.log(w[keep])
    mu, var = mix.means[keep], mix.variances[keep]
    pair = _log_normal_pdf(mu[:, None], mu[None, :], var[:, None] + var[None, :])
    inner = logsumexp(pair + lw[None, :], axis=1)
    return float(-np.dot(w[keep], inner) * LOG2E)


def entropy_upper_bound(mix: GaussianMixture) -> float:
    w = mix.weights
    keep = w > 0
    wk = w[keep]
    per_comp = -np.log2(wk) + 0.5 * np.log2(2.0 * np.pi * np.e * mix.variances[keep])
    return float(np.dot(wk, per_comp))


def entropy_bounds(mix: GaussianMixture) -> tuple[float, float]:
    """Closed-form ``(lower, upper)`` bounds on the differential entropy, in bits.

    The lower bound comes from Jensen's inequality on ``-log E[f]``; the upper
    bound is the entropy of the joint (component label, value) pair. Zero-weight
    components drop out of both.
    """
    return entropy_lower_bound(mix), entropy_upper_bound(mix)


def sample(mix: GaussianMixture, n: int, rng: np.random.Generator) -> np.ndarray:
    idx = rng.choice(len(mix), size=n, p=mix.weights)
    return mix.means[idx] + np.sqrt(mix.variances[idx]) * rng.standard_normal(n)


def mc_entropy_oracle(mix: GaussianMixture, n_samples: int = 10**6, seed: int = 0):
    """Monte Carlo differential entropy ``(estimate, std_error)`` in bits.

    Deterministic for a given seed. Used only to check :func:`entropy_bounds`.
    """
    if n_samples < 10**4:
        raise ValueError("n_samples must be at least 1e4")
    rng = np.random.default_rng(seed)
    x = sample(mix, n_samples, rng)
    nll = np.empty(n_samples)
    for start in range(0, n_samples, _MC_CHUNK):
        chunk = x[start : start + _MC_CHUNK]
        nll[start : start + _MC_CHUNK] = -log_pdf_eval(mix, chunk) * LOG2E
    return float(nll.mean()), float(nll.std(ddof=1) / math.sqrt(n_samples))

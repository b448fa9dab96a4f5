"""Log-normal fading of the squared channel gain z = h**2.

``10*log10(h)`` is Gaussian with mean ``mu_db`` and standard deviation
``sigma_db``, so ``10*log10(z)`` has mean ``2*mu_db`` and standard
deviation ``2*sigma_db``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

XI = 10.0 / math.log(10.0)
_SQRT2 = math.sqrt(2.0)


def make_rng(seed: int, stream_index: int = 0) -> np.random.Generator:
    """Return the PCG64 (128-bit state) stream for ``(seed, stream_index)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_index),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class FadingParams:
    """Per-hop log-normal parameters of ``10*log10(h)``, both in dB."""

    mu_db: float
    sigma_db: float

    def __post_init__(self):
        if not math.isfinite(self.mu_db):
            raise DomainError(f"mu_db must be finite, got {self.mu_db!r}")
        if not (math.isfinite(self.sigma_db) and self.sigma_db > 0):
            raise DomainError(f"sigma_db must be positive and finite, got {self.sigma_db!r}")

    @classmethod
    def from_variance(cls, mu_db: float, variance_db2: float) -> "FadingParams":
        if not variance_db2 > 0:
            raise DomainError(f"variance must be positive, got {variance_db2!r}")
        return cls(mu_db, math.sqrt(variance_db2))

    @property
    def median(self) -> float:
        return 10.0 ** (self.mu_db / 5.0)

    def standardize(self, log_z):
        """Map ``ln z`` to ``(xi*ln z - 2*mu) / (2*sqrt(2)*sigma)``."""
        return (XI * log_z - 2.0 * self.mu_db) / (2.0 * _SQRT2 * self.sigma_db)


def pdf_gain_sq(z, p: FadingParams):
    """Density of the squared gain at ``z > 0``."""
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"pdf_gain_sq needs z > 0, got {z!r}")
    s2 = p.sigma_db ** 2
    out = XI / (arr * math.sqrt(8.0 * math.pi * s2)) * np.exp(
        -((XI * np.log(arr) - 2.0 * p.mu_db) ** 2) / (8.0 * s2)
    )
    return float(out) if arr.ndim == 0 else out


def cdf_gain_sq(w, p: FadingParams):
    """Distribution function of the squared gain; zero at ``w = 0``."""
    arr = np.asarray(w, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError(f"cdf_gain_sq needs w >= 0, got {w!r}")
    with np.errstate(divide="ignore"):
        t = p.standardize(np.log(arr))
    # scipy's erfc maps the w = 0 case (t = -inf) to exactly 0.
    out = 0.5 * special.erfc(-t)
    return float(out) if arr.ndim == 0 else out


def sf_gain_sq(w, p: FadingParams):
    """Survival function ``1 - cdf_gain_sq(w)`` without cancellation near 1."""
    arr = np.asarray(w, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError(f"sf_gain_sq needs w >= 0, got {w!r}")
    with np.errstate(divide="ignore"):
        t = p.standardize(np.log(arr))
    out = 0.5 * special.erfc(t)
    return float(out) if arr.ndim == 0 else out


def sample_gain_sq(rng: np.random.Generator, p: FadingParams, size=None):
    """Draw ``10**(G/5)`` with ``G ~ N(mu_db, sigma_db**2)``.

    Returns a float when ``size`` is None, else an array.
    """
    g = rng.normal(p.mu_db, p.sigma_db, size)
    return 10.0 ** (g / 5.0)

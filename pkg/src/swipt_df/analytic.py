"""Ergodic outage probability by closed form plus one quadrature.

The outage splits as ``1 - O1 + O2`` with

    O1 = Pr{x >= A}                      A = first_hop_scale * S
    O2 = Pr{x >= A, y < K * S / x}       K = second_hop_scale

``O1`` is a single erfc.  ``O2`` integrates the hop-1 density against the
hop-2 distribution function; substituting
``u = (xi*ln z - 2*mu1) / (2*sqrt(2)*sigma1)`` turns the hop-1 density
into ``exp(-u**2)/sqrt(pi)`` and the hop-2 factor into
``erfc(b*u - a)/2`` with ``b = sigma1/sigma2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .channel import XI
from .errors import DomainError
from .model import SystemConfig, Protocol, is_boundary, outage_constants
from .numerics import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    QuadResult,
    gauss_weighted_integral,
)

_SQRT2 = math.sqrt(2.0)
# Above this the lower limit leaves < 1e-300 of hop-1 mass.
_U0_NEGLIGIBLE = 27.0


@dataclass(frozen=True)
class OutageValue:
    probability: float
    quad_error: float
    o1: float
    o2: float


def _log(v: float) -> float:
    return math.log(v) if v > 0 else -math.inf


def _lower_limit(cfg: SystemConfig, proto: Protocol, c_th: float) -> tuple[float, float, float]:
    """Return ``(u0, ln S, ln K)`` for the transformed integral."""
    s, scale1, scale2 = outage_constants(cfg, proto, c_th)
    log_s = _log(s)
    u0 = cfg.hop1.standardize(math.log(scale1) + log_s)
    return u0, log_s, math.log(scale2)


def first_hop_success(cfg: SystemConfig, proto: Protocol, c_th: float) -> float:
    """Probability that the source-relay hop supports ``c_th``."""
    u0, _, _ = _lower_limit(cfg, proto, c_th)
    return float(0.5 * special.erfc(u0))


def second_term(
    cfg: SystemConfig,
    proto: Protocol,
    c_th: float,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
) -> QuadResult:
    """Probability that hop 1 succeeds while hop 2 fails."""
    u0, log_s, log_k = _lower_limit(cfg, proto, c_th)
    if c_th == 0 or u0 > _U0_NEGLIGIBLE:
        return QuadResult(0.0, 0.0, 0)
    h1, h2 = cfg.hop1, cfg.hop2
    a = (XI * (log_k + log_s) - 2.0 * h1.mu_db - 2.0 * h2.mu_db) / (2.0 * _SQRT2 * h2.sigma_db)
    b = h1.sigma_db / h2.sigma_db

    def weight(u):
        return 0.5 * special.erfc(b * u - a)

    return gauss_weighted_integral(u0, weight, abs_tol=abs_tol, rel_tol=rel_tol)


def outage(cfg: SystemConfig, proto: Protocol, c_th: float, **quad_kw) -> OutageValue:
    """Ergodic outage probability of the two-hop link at threshold ``c_th``.

    A TSR/PSR factor of exactly 0 or 1 returns the limiting value: 1 for
    ``c_th > 0`` and 0 for ``c_th = 0``.
    """
    if not (c_th >= 0 and math.isfinite(c_th)):
        raise DomainError(f"c_th must be >= 0 and finite, got {c_th!r}")
    if c_th == 0:
        return OutageValue(0.0, 0.0, 1.0, 0.0)
    if is_boundary(proto):
        return OutageValue(1.0, 0.0, 0.0, 0.0)
    o1 = first_hop_success(cfg, proto, c_th)
    q = second_term(cfg, proto, c_th, **quad_kw)
    raw = 1.0 - o1 + q.value
    return OutageValue(min(max(raw, 0.0), 1.0), q.abs_error_estimate, o1, q.value)

"""Monte Carlo estimate of the outage event min(C_r, C_d) < c_th.

Samples are produced in fixed chunks of ``CHUNK_SIZE`` draws; chunk ``k``
uses the stream ``make_rng(seed, k)``, so the estimate depends only on
``(seed, n)`` and never on how many workers share the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import make_rng, sample_gain_sq
from .errors import DomainError
from .model import SystemConfig, Protocol, capacity, snrs

CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    std_error: float
    n: int
    seed: int
    failures: int


@dataclass(frozen=True)
class McTerms:
    """Empirical frequencies of the two events in the outage decomposition."""

    o1_hat: float
    o2_hat: float
    o1_stderr: float
    o2_stderr: float
    hop1_successes: int
    joint_failures: int
    n: int
    seed: int

    @property
    def failures(self) -> int:
        return self.n - self.hop1_successes + self.joint_failures

    @property
    def p_hat(self) -> float:
        return self.failures / self.n


def binomial_stderr(count: int, n: int) -> float:
    """Normal-approximation standard error; rule of three at 0 or n."""
    if count == 0 or count == n:
        return 3.0 / n
    p = count / n
    return math.sqrt(p * (1.0 - p) / n)


def _chunk_counts(cfg, proto, c_th, seed, index, size):
    rng = make_rng(seed, index)
    x = sample_gain_sq(rng, cfg.hop1, size)
    y = sample_gain_sq(rng, cfg.hop2, size)
    gamma_r, gamma_d = snrs(x, y, cfg, proto)
    ok1 = capacity(gamma_r, proto) >= c_th
    fail2 = capacity(gamma_d, proto) < c_th
    return int(np.count_nonzero(ok1)), int(np.count_nonzero(ok1 & fail2))


def _counts(cfg, proto, c_th, n, seed, workers):
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise DomainError(f"sample count n must be a positive integer, got {n!r}")
    if not (c_th >= 0 and math.isfinite(c_th)):
        raise DomainError(f"c_th must be >= 0, got {c_th!r}")
    n = int(n)
    chunks = [(k, min(CHUNK_SIZE, n - k * CHUNK_SIZE)) for k in range(-(-n // CHUNK_SIZE))]

    def run(chunk):
        return _chunk_counts(cfg, proto, c_th, seed, *chunk)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    ok1 = sum(p[0] for p in parts)
    joint = sum(p[1] for p in parts)
    return n, ok1, joint


def estimate_terms(
    cfg: SystemConfig, proto: Protocol, c_th: float, n: int, seed: int, workers: int = 1
) -> McTerms:
    """Estimate Pr{C_r >= c_th} and Pr{C_r >= c_th, C_d < c_th}."""
    n, ok1, joint = _counts(cfg, proto, c_th, n, seed, workers)
    return McTerms(
        o1_hat=ok1 / n,
        o2_hat=joint / n,
        o1_stderr=binomial_stderr(ok1, n),
        o2_stderr=binomial_stderr(joint, n),
        hop1_successes=ok1,
        joint_failures=joint,
        n=n,
        seed=int(seed),
    )


def estimate_outage(
    cfg: SystemConfig, proto: Protocol, c_th: float, n: int, seed: int, workers: int = 1
) -> McEstimate:
    """Estimate the outage probability from ``n`` paired gain draws."""
    n, ok1, joint = _counts(cfg, proto, c_th, n, seed, workers)
    failures = n - ok1 + joint
    return McEstimate(
        p_hat=failures / n,
        std_error=binomial_stderr(failures, n),
        n=n,
        seed=int(seed),
        failures=failures,
    )

"""Search for the outage-minimizing TSR time factor or PSR split factor.

A 0.01-step grid over [0.01, 0.99] locates the basin, then golden-section
search refines inside the two grid cells around the grid argmin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import outage
from .errors import DomainError
from .model import PSR, TSR, SystemConfig

FACTOR_MIN = 0.01
FACTOR_MAX = 0.99
GRID_STEP = 0.01
FACTOR_TOL = 1e-4

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MethodTrace:
    grid_argmin: float
    refined: float
    boundary_suspect: bool = False
    non_unimodal: bool = False


@dataclass(frozen=True)
class OptimumResult:
    factor: float
    outage: float
    quad_error: float
    evaluations: int
    method_trace: MethodTrace


def _protocol_for(kind: str):
    kind = kind.lower()
    if kind == "tsr":
        return TSR
    if kind == "psr":
        return PSR
    raise DomainError(f"only tsr and psr have a factor to optimize, got {kind!r}")


def golden_section(f, lo: float, hi: float, tol: float):
    """Minimize a unimodal ``f`` on [lo, hi]; returns (x, f(x), evaluations)."""
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    evals = 2
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
        evals += 1
    return (c, fc, evals) if fc <= fd else (d, fd, evals)


def optimize_factor(cfg: SystemConfig, kind: str, c_th: float) -> OptimumResult:
    """Minimize the analytic outage over the protocol factor."""
    if not (c_th > 0 and math.isfinite(c_th)):
        raise DomainError(f"c_th must be > 0 to optimize, got {c_th!r}")
    make = _protocol_for(kind)
    cache: dict[float, object] = {}

    def evaluate(factor):
        if factor not in cache:
            cache[factor] = outage(cfg, make(factor), c_th)
        return cache[factor]

    n_grid = int(round((FACTOR_MAX - FACTOR_MIN) / GRID_STEP)) + 1
    grid = np.round(np.linspace(FACTOR_MIN, FACTOR_MAX, n_grid), 10)
    values = np.array([evaluate(float(g)).probability for g in grid])
    i = int(np.argmin(values))
    grid_best = float(grid[i])
    boundary = i in (0, n_grid - 1)

    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, n_grid - 1)])
    refined, _, _ = golden_section(lambda t: evaluate(t).probability, lo, hi, FACTOR_TOL)

    grid_val = evaluate(grid_best)
    ref_val = evaluate(refined)
    # At a grid edge the search only slides toward the edge; that is not a
    # sign of a second basin.
    non_unimodal = not boundary and ref_val.probability > grid_val.probability + grid_val.quad_error
    best, best_val = (refined, ref_val) if ref_val.probability <= grid_val.probability else (grid_best, grid_val)
    return OptimumResult(
        factor=best,
        outage=best_val.probability,
        quad_error=best_val.quad_error,
        evaluations=len(cache),
        method_trace=MethodTrace(grid_best, refined, boundary, non_unimodal),
    )

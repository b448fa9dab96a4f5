"""Parameter sweeps with analytic and Monte Carlo columns, written as CSV."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .analytic import outage
from .errors import AgreementError, DomainError, SwiptError
from .model import SystemConfig, make_protocol
from .montecarlo import estimate_outage
from .optimize import FACTOR_MAX, FACTOR_MIN, optimize_factor

AXES = ("factor", "c_th", "distance", "ps", "eta")
SERIES_PARAMS = ("factor", "c_th", "distance", "ps", "eta", "m", "d1", "d2")
CSV_HEADER = ("axis", "series", "analytic", "quad_error", "mc", "mc_stderr", "optimal_factor")
GATE_SIGMAS = 4.0


@dataclass(frozen=True)
class SweepSpec:
    """One figure-style study: an axis, a protocol and one curve per series entry.

    ``factor`` fixes the TSR/PSR factor on non-factor axes; when it is
    None the factor is optimized at every row.  ``c_th`` is the threshold
    used on every axis other than ``c_th``.
    """

    base: SystemConfig
    protocol_kind: str
    vary: str
    start: float
    stop: float
    steps: int
    series: Sequence[tuple[str, float]] = ()
    mc_samples: int = 0
    seed: int = 0
    c_th: float = 1.0
    factor: float | None = None

    def __post_init__(self):
        kind = self.protocol_kind.lower()
        if kind not in ("tsr", "psr", "irr"):
            raise DomainError(f"protocol_kind must be tsr, psr or irr, got {self.protocol_kind!r}")
        if self.vary not in AXES:
            raise DomainError(f"vary must be one of {AXES}, got {self.vary!r}")
        if not self.start < self.stop:
            raise DomainError(f"sweep needs from < to, got {self.start!r} >= {self.stop!r}")
        if self.steps < 2:
            raise DomainError(f"steps must be >= 2, got {self.steps!r}")
        if self.mc_samples < 0:
            raise DomainError(f"mc_samples must be >= 0, got {self.mc_samples!r}")
        for param, _ in self.series:
            if param not in SERIES_PARAMS:
                raise DomainError(f"unknown series parameter {param!r}")
        if self.vary == "factor":
            if kind == "irr":
                raise DomainError("irr has no factor to sweep")
            if self.start < FACTOR_MIN or self.stop > FACTOR_MAX:
                raise DomainError(f"factor axis must stay inside [{FACTOR_MIN}, {FACTOR_MAX}]")
        lower = {"c_th": 0.0, "distance": 0.0, "ps": 0.0, "eta": 0.0}
        if self.vary in lower and self.start < lower[self.vary]:
            raise DomainError(f"{self.vary} axis must be non-negative")
        if self.vary == "eta" and self.stop > 1.0:
            raise DomainError("eta axis must stay inside (0, 1]")

    def axis(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    series: str
    analytic: float
    quad_error: float
    mc: float | None = None
    mc_stderr: float | None = None
    optimal_factor: float | None = None


@dataclass
class _Point:
    cfg: SystemConfig
    c_th: float
    factor: float | None = None
    extra: dict = field(default_factory=dict)


def _apply(point: _Point, param: str, value: float) -> None:
    if param == "distance":
        point.cfg = point.cfg.with_(d1=value / 2.0, d2=value / 2.0)
    elif param == "c_th":
        point.c_th = value
    elif param == "factor":
        point.factor = value
    else:
        point.cfg = point.cfg.with_(**{param: value})


def _series_label(kind: str, override: tuple[str, float] | None) -> str:
    if override is None:
        return kind
    return f"{kind}:{override[0]}={override[1]:g}"


def _row_seed(seed: int, series_index: int, row_index: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(series_index, row_index))
    return int(ss.generate_state(1, np.uint64)[0])


def _evaluate(spec: SweepSpec, label: str, override, series_index: int, row_index: int, x: float) -> SweepRow:
    kind = spec.protocol_kind.lower()
    point = _Point(spec.base, spec.c_th, spec.factor)
    if override is not None:
        _apply(point, *override)
    _apply(point, spec.vary, float(x))

    optimal = None
    if kind == "irr":
        factor = None
    elif point.factor is not None:
        factor = point.factor
    elif point.c_th > 0:
        opt = optimize_factor(point.cfg, kind, point.c_th)
        factor = optimal = opt.factor
    else:
        # Every factor gives zero outage at a zero threshold.
        factor = optimal = 0.5
    proto = make_protocol(kind, factor)
    value = outage(point.cfg, proto, point.c_th)

    mc = mc_stderr = None
    if spec.mc_samples > 0:
        est = estimate_outage(
            point.cfg, proto, point.c_th, spec.mc_samples, _row_seed(spec.seed, series_index, row_index)
        )
        mc, mc_stderr = est.p_hat, est.std_error
    row = SweepRow(float(x), label, value.probability, value.quad_error, mc, mc_stderr, optimal)
    if mc is not None:
        gap = abs(row.analytic - mc)
        if gap > GATE_SIGMAS * mc_stderr + row.quad_error:
            raise AgreementError(
                f"analytic/MC gate violated at {spec.vary}={x:g} series {label!r}: "
                f"analytic={row.analytic:.6g} mc={mc:.6g} stderr={mc_stderr:.3g}",
                row=row,
            )
    return row


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Evaluate every (series, axis value) point, series in spec order.

    Raises AgreementError on the first row whose Monte Carlo estimate
    strays more than four standard errors plus the quadrature error from
    the analytic value.
    """
    kind = spec.protocol_kind.lower()
    overrides = list(spec.series) or [None]
    jobs = [
        (_series_label(kind, ov), ov, si, ri, x)
        for si, ov in enumerate(overrides)
        for ri, x in enumerate(spec.axis())
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: _evaluate(spec, *job), jobs))
    return [_evaluate(spec, *job) for job in jobs]


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    if not math.isfinite(value):
        return repr(float(value))
    return np.format_float_positional(value, precision=12, unique=False, fractional=False, trim="-")


def write_csv(rows: Sequence[SweepRow], path) -> None:
    """Write rows under the fixed header; absent values become empty fields."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow([
                    _fmt(r.axis_value), r.series, _fmt(r.analytic), _fmt(r.quad_error),
                    _fmt(r.mc), _fmt(r.mc_stderr), _fmt(r.optimal_factor),
                ])
    except OSError as exc:
        raise SwiptError(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> list[SweepRow]:
    def opt(s):
        return float(s) if s != "" else None

    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            SweepRow(
                float(r["axis"]), r["series"], float(r["analytic"]), float(r["quad_error"]),
                opt(r["mc"]), opt(r["mc_stderr"]), opt(r["optimal_factor"]),
            )
            for r in reader
        ]


# Curve levels for the figure studies; not recoverable from the plots.
FIG4_ETAS = (0.4, 0.7, 1.0)
FIG5_DISTANCES = (6.0, 10.0)
FIG6_POWERS = (0.5, 1.0, 2.0)


def figure_specs(name: str, base: SystemConfig | None = None, mc_samples: int = 0, seed: int = 0):
    """Return ``{file name: [SweepSpec, ...]}`` for fig4, fig5 or fig6."""
    base = base or SystemConfig.standard()
    if name == "fig4":
        return {
            f"fig4_{kind}.csv": [
                SweepSpec(base, kind, "factor", 0.01, 0.99, 99,
                          series=[("eta", e) for e in FIG4_ETAS],
                          mc_samples=mc_samples, seed=seed)
            ]
            for kind in ("tsr", "psr")
        }
    if name == "fig5":
        return {"fig5.csv": [
            SweepSpec(base, kind, "c_th", 0.1, 4.0, 40,
                      series=[("distance", d) for d in FIG5_DISTANCES],
                      mc_samples=mc_samples, seed=seed + i)
            for i, kind in enumerate(("tsr", "psr", "irr"))
        ]}
    if name == "fig6":
        return {"fig6.csv": [
            SweepSpec(base, kind, "distance", 2.0, 12.0, 11,
                      series=[("ps", p) for p in FIG6_POWERS],
                      mc_samples=mc_samples, seed=seed + i)
            for i, kind in enumerate(("tsr", "psr", "irr"))
        ]}
    raise DomainError(f"unknown figure {name!r}; expected fig4, fig5 or fig6")


def run_figure(name: str, out_dir, base: SystemConfig | None = None, mc_samples: int = 0,
               seed: int = 0, workers: int = 1) -> dict[str, list[SweepRow]]:
    """Compute a figure study and write its CSV file(s) into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for fname, specs in figure_specs(name, base, mc_samples, seed).items():
        rows = [r for spec in specs for r in run_sweep(spec, workers=workers)]
        write_csv(rows, out_dir / fname)
        written[fname] = rows
    return written

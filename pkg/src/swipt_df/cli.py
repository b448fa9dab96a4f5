"""Command-line front end.

Every invocation prints one JSON record on stdout; diagnostics go to
stderr.  Exit codes: 0 success, 2 usage or validation error, 3 numerical
convergence failure, 4 analytic/Monte Carlo agreement gate violation.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

from .analytic import outage
from .channel import FadingParams
from .errors import AgreementError, ConvergenceError, DomainError, SwiptError
from .experiments import AXES, GATE_SIGMAS, SERIES_PARAMS, SweepSpec, run_figure, run_sweep, write_csv
from .model import SystemConfig, make_protocol
from .montecarlo import estimate_outage
from .optimize import optimize_factor

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_GATE = 4


class UsageError(Exception):
    pass


def _float(check, what):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
        if not (math.isfinite(v) and check(v)):
            raise argparse.ArgumentTypeError(f"must be {what}, got {text!r}")
        return v
    return parse


positive = _float(lambda v: v > 0, "> 0")
nonneg = _float(lambda v: v >= 0, ">= 0")
finite = _float(lambda v: True, "finite")
unit_closed = _float(lambda v: 0 <= v <= 1, "in [0, 1]")
efficiency = _float(lambda v: 0 < v <= 1, "in (0, 1]")
exponent = _float(lambda v: v >= 1, ">= 1")


def _count(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text!r}")
    return v


# flag -> (parser, help with units)
CONFIG_FLAGS = {
    "ps": (positive, "source transmit power P_s [W] (default 1)"),
    "eta": (efficiency, "energy-harvester efficiency [0-1] (default 1)"),
    "m": (exponent, "path-loss exponent [-] (default 2)"),
    "d1": (positive, "source-relay distance [m] (default 5)"),
    "d2": (positive, "relay-destination distance [m] (default 5)"),
    "noise-relay": (positive, "total relay noise variance [W] (default 0.01)"),
    "noise-dest": (positive, "destination noise variance [W] (default 0.01)"),
    "mu1": (finite, "hop-1 mean of 10log10(h) [dB] (default 3)"),
    "mu2": (finite, "hop-2 mean of 10log10(h) [dB] (default 3)"),
    "sigma2-db1": (positive, "hop-1 variance of 10log10(h) [dB^2] (default 3)"),
    "sigma2-db2": (positive, "hop-2 variance of 10log10(h) [dB^2] (default 3)"),
}
_DEFAULTS = {"mu1": 3.0, "mu2": 3.0, "sigma2-db1": 3.0, "sigma2-db2": 3.0}
_DIRECT = {"ps": "ps", "eta": "eta", "m": "m", "d1": "d1", "d2": "d2",
           "noise-relay": "noise_relay", "noise-dest": "noise_dest"}


def _add_config_flags(p):
    g = p.add_argument_group("link configuration")
    g.add_argument("--config", metavar="PATH",
                   help="flat 'key = value' file using the flag names below; flags override it")
    for name, (parse, text) in CONFIG_FLAGS.items():
        g.add_argument(f"--{name}", type=parse, default=None, metavar="X", help=text)


def _add_protocol_flags(p, kinds=("tsr", "psr", "irr")):
    p.add_argument("--protocol", required=True, choices=kinds, help="relaying protocol")
    p.add_argument("--cth", type=nonneg, required=True, metavar="C",
                   help="capacity threshold C_th [bit/s/Hz]")


def _add_factor_flags(p):
    p.add_argument("--tau", type=unit_closed, metavar="F", help="TSR energy-harvesting time factor [0-1]")
    p.add_argument("--rho", type=unit_closed, metavar="F", help="PSR power-splitting factor [0-1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swipt-df",
        description="Outage analysis of energy-harvesting DF relaying over log-normal fading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("outage", help="analytic outage probability at one point")
    _add_protocol_flags(p)
    _add_factor_flags(p)
    _add_config_flags(p)

    p = sub.add_parser("mc", help="analytic outage plus a Monte Carlo check")
    _add_protocol_flags(p)
    _add_factor_flags(p)
    p.add_argument("--samples", type=_count, default=1_000_000, metavar="N",
                   help="Monte Carlo sample count [-] (default 1000000)")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="random seed [-] (default 0)")
    p.add_argument("--workers", type=_count, default=1, metavar="K", help="worker threads [-]")
    _add_config_flags(p)

    p = sub.add_parser("optimize", help="optimal TSR tau* or PSR rho*")
    _add_protocol_flags(p, kinds=("tsr", "psr"))
    _add_config_flags(p)

    p = sub.add_parser("sweep", help="one parameter sweep written as CSV")
    p.add_argument("--protocol", required=True, choices=("tsr", "psr", "irr"), help="relaying protocol")
    p.add_argument("--vary", required=True, choices=AXES, help="swept axis (distance is d1 + d2 [m])")
    p.add_argument("--from", dest="start", type=finite, required=True, metavar="X", help="first axis value")
    p.add_argument("--to", dest="stop", type=finite, required=True, metavar="X", help="last axis value")
    p.add_argument("--steps", type=_count, required=True, metavar="N", help="number of axis points [-]")
    p.add_argument("--series", action="append", default=[], metavar="PARAM=VALUE",
                   help=f"one curve per occurrence; PARAM in {', '.join(SERIES_PARAMS)}")
    p.add_argument("--cth", type=nonneg, default=1.0, metavar="C",
                   help="capacity threshold off the c_th axis [bit/s/Hz] (default 1)")
    _add_factor_flags(p)
    p.add_argument("--samples", type=int, default=0, metavar="N",
                   help="Monte Carlo samples per row, 0 disables [-] (default 0)")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="random seed [-] (default 0)")
    p.add_argument("--out", required=True, metavar="PATH", help="output CSV file")
    _add_config_flags(p)

    p = sub.add_parser("figures", help="reproduce a figure study as CSV")
    p.add_argument("--name", required=True, choices=("fig4", "fig5", "fig6"), help="figure study")
    p.add_argument("--out", required=True, metavar="DIR", help="output directory")
    p.add_argument("--samples", type=int, default=100_000, metavar="N",
                   help="Monte Carlo samples per row, 0 disables [-] (default 100000)")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="random seed [-] (default 0)")
    _add_config_flags(p)
    return parser


def _read_config_file(path) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_string("[config]\n" + fh.read(), source=path)
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}")
    except configparser.Error as exc:
        raise UsageError(f"--config: malformed file {path}: {exc}")
    values = {}
    for key, text in cp["config"].items():
        if key not in CONFIG_FLAGS:
            raise UsageError(f"--config: unknown key {key!r} in {path}")
        try:
            values[key] = CONFIG_FLAGS[key][0](text)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"--config: key {key!r}: {exc}")
    return values


def config_from_args(args) -> SystemConfig:
    values = dict(_DEFAULTS)
    if args.config:
        values.update(_read_config_file(args.config))
    for name in CONFIG_FLAGS:
        v = getattr(args, name.replace("-", "_"))
        if v is not None:
            values[name] = v
    kwargs = {field: values[flag] for flag, field in _DIRECT.items() if flag in values}
    kwargs["hop1"] = FadingParams.from_variance(values["mu1"], values["sigma2-db1"])
    kwargs["hop2"] = FadingParams.from_variance(values["mu2"], values["sigma2-db2"])
    return SystemConfig.standard(**kwargs)


def _factor(args, protocol):
    tau, rho = getattr(args, "tau", None), getattr(args, "rho", None)
    if protocol == "tsr":
        if rho is not None:
            raise UsageError("--rho applies to psr only; use --tau with tsr")
        return tau
    if protocol == "psr":
        if tau is not None:
            raise UsageError("--tau applies to tsr only; use --rho with psr")
        return rho
    if tau is not None or rho is not None:
        raise UsageError("irr takes neither --tau nor --rho")
    return None


def _required_factor(args):
    factor = _factor(args, args.protocol)
    if args.protocol != "irr" and factor is None:
        flag = "--tau" if args.protocol == "tsr" else "--rho"
        raise UsageError(f"missing required flag {flag} for protocol {args.protocol}")
    return factor


def _outage_record(args, cfg):
    factor = _required_factor(args)
    proto = make_protocol(args.protocol, factor)
    v = outage(cfg, proto, args.cth)
    record = {
        "protocol": args.protocol,
        "factor": factor,
        "c_th": args.cth,
        "analytic": v.probability,
        "quad_error": v.quad_error,
        "o1": v.o1,
        "o2": v.o2,
    }
    return record, proto


def _cmd_outage(args, cfg):
    record, _ = _outage_record(args, cfg)
    return record, EXIT_OK


def _cmd_mc(args, cfg):
    record, proto = _outage_record(args, cfg)
    est = estimate_outage(cfg, proto, args.cth, args.samples, args.seed, workers=args.workers)
    gap = abs(record["analytic"] - est.p_hat)
    record.update(
        mc=est.p_hat,
        mc_stderr=est.std_error,
        n=est.n,
        seed=est.seed,
        sigma_gap=gap / est.std_error,
    )
    if gap > GATE_SIGMAS * est.std_error + record["quad_error"]:
        print(f"error: analytic/MC gate violated (sigma_gap={record['sigma_gap']:.2f})", file=sys.stderr)
        return record, EXIT_GATE
    return record, EXIT_OK


def _cmd_optimize(args, cfg):
    if args.cth <= 0:
        raise UsageError("--cth must be > 0 for optimize")
    r = optimize_factor(cfg, args.protocol, args.cth)
    return {
        "protocol": args.protocol,
        "c_th": args.cth,
        "factor_star": r.factor,
        "outage_star": r.outage,
        "evaluations": r.evaluations,
    }, EXIT_OK


def _parse_series(items):
    out = []
    for item in items:
        param, sep, value = item.partition("=")
        if not sep or param not in SERIES_PARAMS:
            raise UsageError(f"--series: expected PARAM=VALUE with PARAM in {SERIES_PARAMS}, got {item!r}")
        try:
            out.append((param, finite(value)))
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"--series {item!r}: {exc}")
    return out


def _cmd_sweep(args, cfg):
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    try:
        spec = SweepSpec(
            base=cfg,
            protocol_kind=args.protocol,
            vary=args.vary,
            start=args.start,
            stop=args.stop,
            steps=args.steps,
            series=_parse_series(args.series),
            mc_samples=args.samples,
            seed=args.seed,
            c_th=args.cth,
            factor=_factor(args, args.protocol),
        )
    except DomainError as exc:
        raise UsageError(f"sweep: {exc}")
    rows = run_sweep(spec)
    write_csv(rows, args.out)
    return {"path": args.out, "rows": len(rows)}, EXIT_OK


def _cmd_figures(args, cfg):
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    written = run_figure(args.name, args.out, base=cfg, mc_samples=args.samples, seed=args.seed)
    return {
        "name": args.name,
        "files": sorted(written),
        "rows": sum(len(v) for v in written.values()),
    }, EXIT_OK


_COMMANDS = {
    "outage": _cmd_outage,
    "mc": _cmd_mc,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "figures": _cmd_figures,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        record, code = _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except AgreementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE
    except SwiptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(record))
    return code


if __name__ == "__main__":
    sys.exit(main())

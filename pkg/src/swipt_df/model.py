"""System model of the energy-harvesting DF relay link.

Covers the three relaying receivers (time switching, power splitting and
the ideal receiver): per-realization SNRs, harvested energy, relay
transmit power, hop capacity and the constants that turn the outage
events into thresholds on the squared gains ``x = h1**2``, ``y = h2**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

import numpy as np

from .channel import FadingParams
from .errors import DomainError

_LN2 = math.log(2.0)


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def _default_hop() -> FadingParams:
    return FadingParams.from_variance(3.0, 3.0)


@dataclass(frozen=True)
class SystemConfig:
    """Link parameters. Powers in W, distances in m, time in s.

    ``noise_relay`` is the total relay noise variance used by every SNR;
    the optional antenna/conversion components must add up to it.
    """

    ps: float = 1.0
    eta: float = 1.0
    m: float = 2.0
    d1: float = 5.0
    d2: float = 5.0
    noise_relay: float = 0.01
    noise_dest: float = 0.01
    noise_antenna: float | None = None
    noise_conversion: float | None = None
    hop1: FadingParams = field(default_factory=_default_hop)
    hop2: FadingParams = field(default_factory=_default_hop)
    block_time: float = 1.0

    def __post_init__(self):
        for name in ("ps", "d1", "d2", "noise_relay", "noise_dest", "block_time"):
            _positive(name, getattr(self, name))
        if not (0.0 < self.eta <= 1.0):
            raise DomainError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not (math.isfinite(self.m) and self.m >= 1.0):
            raise DomainError(f"m must be >= 1, got {self.m!r}")
        parts = (self.noise_antenna, self.noise_conversion)
        if any(v is not None and not (math.isfinite(v) and v >= 0) for v in parts):
            raise DomainError(f"component noises must be >= 0, got {parts!r}")
        if None not in parts and not math.isclose(sum(parts), self.noise_relay, rel_tol=1e-12):
            raise DomainError(
                f"noise_antenna + noise_conversion = {sum(parts)!r} "
                f"does not match noise_relay = {self.noise_relay!r}"
            )

    @classmethod
    def standard(cls, **overrides) -> "SystemConfig":
        """Reference setup: P_s = 1 W, eta = 1, m = 2, d1 = d2 = 5 m,
        sigma_d^2 = 2 sigma_ar^2 = 2 sigma_cr^2 = 0.01 W, mu = 3 dB and
        a fading variance of 3 dB^2 on both hops."""
        if "noise_relay" not in overrides:
            overrides.setdefault("noise_antenna", 0.005)
            overrides.setdefault("noise_conversion", 0.005)
        return cls(**overrides)

    def with_(self, **changes) -> "SystemConfig":
        """Copy with ``changes``; drops stale noise components if the total changes."""
        if "noise_relay" in changes:
            changes.setdefault("noise_antenna", None)
            changes.setdefault("noise_conversion", None)
        return replace(self, **changes)

    @property
    def loss1(self) -> float:
        return self.d1 ** self.m

    @property
    def loss2(self) -> float:
        return self.d2 ** self.m


def _check_factor(name, value):
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class TSR:
    """Time switching: a fraction ``tau`` of the block harvests energy."""

    tau: float

    def __post_init__(self):
        _check_factor("tau", self.tau)

    @property
    def factor(self) -> float:
        return self.tau


@dataclass(frozen=True)
class PSR:
    """Power splitting: a fraction ``rho`` of the received power is harvested."""

    rho: float

    def __post_init__(self):
        _check_factor("rho", self.rho)

    @property
    def factor(self) -> float:
        return self.rho


@dataclass(frozen=True)
class IRR:
    """Ideal receiver: harvests and decodes the same signal."""

    @property
    def factor(self) -> None:
        return None


Protocol = Union[TSR, PSR, IRR]


def protocol_name(proto: Protocol) -> str:
    return type(proto).__name__.lower()


def make_protocol(kind: str, factor: float | None = None) -> Protocol:
    """Build a protocol from its name (``tsr``, ``psr`` or ``irr``)."""
    kind = kind.lower()
    if kind == "irr":
        return IRR()
    if factor is None:
        raise DomainError(f"protocol {kind} needs a factor")
    if kind == "tsr":
        return TSR(factor)
    if kind == "psr":
        return PSR(factor)
    raise DomainError(f"unknown protocol {kind!r}")


def is_boundary(proto: Protocol) -> bool:
    """True for a TSR/PSR factor of exactly 0 or 1."""
    return proto.factor in (0.0, 1.0)


def _require_interior(proto: Protocol):
    if is_boundary(proto):
        raise DomainError(
            f"{protocol_name(proto)} factor must lie strictly inside (0, 1), got {proto.factor!r}"
        )


def _require_positive_gains(*gains):
    for g in gains:
        if np.any(~(np.asarray(g) > 0)):
            raise DomainError("channel gains must be positive")


class SnrPair(NamedTuple):
    gamma_r: float
    gamma_d: float


class OutageConstants(NamedTuple):
    """Thresholds of the outage events.

    Hop 1 succeeds iff ``x >= first_hop_scale * threshold_snr``; given that,
    hop 2 fails iff ``y < second_hop_scale * threshold_snr / x``.
    """

    threshold_snr: float
    first_hop_scale: float
    second_hop_scale: float


def relay_power(x, cfg: SystemConfig, proto: Protocol):
    """Relay transmit power in W funded by the energy harvested from ``x``."""
    _require_interior(proto)
    _require_positive_gains(x)
    base = cfg.eta * cfg.ps * x / cfg.loss1
    if isinstance(proto, TSR):
        return 2.0 * proto.tau / (1.0 - proto.tau) * base
    if isinstance(proto, PSR):
        return proto.rho * base
    return base


def harvested_energy(x, cfg: SystemConfig, proto: Protocol):
    """Energy in J harvested at the relay during one block."""
    _require_interior(proto)
    _require_positive_gains(x)
    base = cfg.eta * cfg.ps * x * cfg.block_time / cfg.loss1
    if isinstance(proto, TSR):
        return proto.tau * base
    if isinstance(proto, PSR):
        return 0.5 * proto.rho * base
    return 0.5 * base


def transmit_phase(cfg: SystemConfig, proto: Protocol) -> float:
    """Duration of the relay-to-destination phase in s."""
    if isinstance(proto, TSR):
        return 0.5 * (1.0 - proto.tau) * cfg.block_time
    return 0.5 * cfg.block_time


def snrs(x, y, cfg: SystemConfig, proto: Protocol) -> SnrPair:
    """Linear SNRs at relay and destination for gains ``x`` and ``y``.

    Works elementwise on arrays.
    """
    _require_interior(proto)
    _require_positive_gains(x, y)
    gamma_r = cfg.ps * x / (cfg.loss1 * cfg.noise_relay)
    if isinstance(proto, PSR):
        gamma_r = (1.0 - proto.rho) * gamma_r
    gamma_d = relay_power(x, cfg, proto) * y / (cfg.loss2 * cfg.noise_dest)
    return SnrPair(gamma_r, gamma_d)


def capacity(gamma, proto: Protocol):
    """Hop capacity in bit/s/Hz."""
    if np.any(~(np.asarray(gamma) >= 0)):
        raise DomainError(f"SNR must be >= 0, got {gamma!r}")
    pre = 0.5 * (1.0 - proto.tau) if isinstance(proto, TSR) else 0.5
    return pre * np.log2(1.0 + gamma)


def _threshold(exponent: float) -> float:
    # 2**exponent - 1 without cancellation near 0 and saturating at inf.
    try:
        return math.expm1(exponent * _LN2)
    except OverflowError:
        return math.inf


def outage_constants(cfg: SystemConfig, proto: Protocol, c_th: float) -> OutageConstants:
    """Threshold SNR and the two gain scales of the outage events."""
    if not (c_th >= 0 and math.isfinite(c_th)):
        raise DomainError(f"c_th must be >= 0, got {c_th!r}")
    _require_interior(proto)
    hop1 = cfg.loss1 * cfg.noise_relay / cfg.ps
    hop2 = cfg.loss1 * cfg.loss2 * cfg.noise_dest / (cfg.eta * cfg.ps)
    if isinstance(proto, TSR):
        s = _threshold(2.0 * c_th / (1.0 - proto.tau))
        return OutageConstants(s, hop1, hop2 * (1.0 - proto.tau) / (2.0 * proto.tau))
    s = _threshold(2.0 * c_th)
    if isinstance(proto, PSR):
        return OutageConstants(s, hop1 / (1.0 - proto.rho), hop2 / proto.rho)
    return OutageConstants(s, hop1, hop2)

"""Shared parameter types and derived channel constants.

All types are frozen dataclasses, validated at construction; downstream
modules assume valid parameters.  The battery capacity uses ``math.inf``
(aliased as :data:`UNBOUNDED`) as the sentinel for an unbounded buffer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

UNBOUNDED = math.inf


class ValidationError(ValueError):
    """A parameter failed its domain constraint; names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def interference_kappa(alpha: float) -> float:
    """Rayleigh-interference constant 2*pi^2 / (alpha * sin(2*pi/alpha)).

    Finite and strictly positive for alpha > 2; diverges as alpha -> 2.
    """
    return 2.0 * math.pi**2 / (alpha * math.sin(2.0 * math.pi / alpha))


def spectral_rate(theta: float) -> float:
    """Rate in bits/sec/Hz for SIR threshold theta.

    Base-2 logarithm, isolated here so the base is trivially switchable.
    """
    return math.log2(1.0 + theta)


@dataclass(frozen=True)
class ChannelParams:
    """Propagation parameters of a single link class.

    alpha: path-loss exponent (> 2; the interference constant diverges at 2)
    theta: SIR decoding threshold, linear scale (> 0)
    d:     transmitter-receiver distance in meters (> 0)
    """

    alpha: float
    theta: float
    d: float

    def __post_init__(self):
        if not (self.alpha > 2.0 and math.isfinite(self.alpha)):
            raise ValidationError("alpha", f"path-loss exponent must be > 2, got {self.alpha}")
        if not (self.theta > 0.0 and math.isfinite(self.theta)):
            raise ValidationError("theta", f"SIR threshold must be > 0, got {self.theta}")
        if not (self.d > 0.0 and math.isfinite(self.d)):
            raise ValidationError("d", f"link distance must be > 0, got {self.d}")


@dataclass(frozen=True)
class DerivedChannel:
    """Constants derived from :class:`ChannelParams`.

    kappa:      interference constant (dimensionless)
    lambda_max: critical interferer density 1/(d^2 theta^(2/alpha) kappa), m^-2
    rate:       log2(1 + theta), bits/sec/Hz
    """

    kappa: float
    lambda_max: float
    rate: float


def derive_channel(channel: ChannelParams) -> DerivedChannel:
    """Compute kappa, lambda_max and rate for a validated channel.

    Pure function: identical inputs give bit-identical outputs.
    """
    kappa = interference_kappa(channel.alpha)
    lambda_max = 1.0 / (channel.d**2 * channel.theta ** (2.0 / channel.alpha) * kappa)
    return DerivedChannel(kappa=kappa, lambda_max=lambda_max, rate=spectral_rate(channel.theta))


@dataclass(frozen=True)
class EnergyModel:
    """Bernoulli energy harvesting: one unit arrives per slot with probability p.

    B is the battery capacity: a positive integer, or UNBOUNDED.
    """

    p: float
    B: float = UNBOUNDED

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValidationError("p", f"arrival rate must be in (0, 1], got {self.p}")
        if not math.isinf(self.B):
            if self.B < 1 or self.B != int(self.B):
                raise ValidationError("B", f"battery capacity must be a positive integer or UNBOUNDED, got {self.B}")

    @property
    def is_unbounded(self) -> bool:
        return math.isinf(self.B)


@dataclass(frozen=True)
class NetworkParams:
    """A Poisson field of transmitters with a common channel and energy model.

    lam: transmitter density in m^-2 (> 0).
    """

    lam: float
    channel: ChannelParams
    energy: EnergyModel

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValidationError("lambda", f"transmitter density must be > 0, got {self.lam}")

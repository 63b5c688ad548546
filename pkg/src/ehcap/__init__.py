"""Transmission-capacity toolkit for energy-harvesting random-access networks.

Closed-form analysis (ALOHA access optimization, throughput games, CSMA
back-off and outage) over a Poisson field of Rayleigh-faded interferers,
with seeded Monte Carlo estimators validating every formula.
"""

from .model import (
    UNBOUNDED,
    ChannelParams,
    DerivedChannel,
    EnergyModel,
    NetworkParams,
    ValidationError,
    derive_channel,
)

__version__ = "0.1.0"

__all__ = [
    "UNBOUNDED",
    "ChannelParams",
    "DerivedChannel",
    "EnergyModel",
    "NetworkParams",
    "ValidationError",
    "derive_channel",
    "__version__",
]

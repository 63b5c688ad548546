"""Selfish throughput game: best responses, symmetric equilibria, price of anarchy.

A transmitter using access probability q against a field at q_other earns
f(q) * exp(-f(q_other)*lambda/lambda_max) * rate, which is monotone in f(q),
so best responses maximize the effective access f alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from . import aloha, energy_queue
from .model import NetworkParams, derive_channel


@dataclass(frozen=True)
class SneResult:
    """Symmetric Nash equilibrium summary.

    The equilibrium set is the closed interval [q_lo, q_hi] (a point when
    the endpoints coincide).  Every equilibrium yields the same per-node
    throughput, so capacity_at_sne = lam * per_node_throughput and poa are
    well defined without a worst-case convention.
    """

    q_lo: float
    q_hi: float
    per_node_throughput: float
    capacity_at_sne: float
    poa: float


def throughput(q: float, q_other: float, params: NetworkParams) -> float:
    """Per-node throughput (rate included) when self plays q against q_other."""
    p, B = params.energy.p, params.energy.B
    der = derive_channel(params.channel)
    f_self = energy_queue.effective_access(p, q, B)
    f_other = energy_queue.effective_access(p, q_other, B)
    return f_self * math.exp(-f_other * params.lam / der.lambda_max) * der.rate


def best_response(q_other: float, params: NetworkParams) -> Tuple[float, float]:
    """Set of q maximizing own throughput, as a closed interval.

    Unbounded battery: f plateaus at p for q >= p, so [p, 1].
    Finite battery: f is strictly increasing, so {1}.
    """
    del q_other  # the response does not depend on the field's strategy
    if params.energy.is_unbounded:
        return (params.energy.p, 1.0)
    return (1.0, 1.0)


def price_of_anarchy(params: NetworkParams) -> float:
    """Globally optimal capacity divided by the (common) equilibrium capacity.

    Exactly 1 when the global optimum already lies in the equilibrium set:
    p < lambda_max/lambda for an unbounded battery, or a finite-battery
    access target f_B(q) = lambda_max/lambda whose root exceeds 1.  Otherwise
    the ratio of aloha capacities, so the rate factor cancels.
    """
    der = derive_channel(params.channel)
    ratio = der.lambda_max / params.lam
    p = params.energy.p
    if params.energy.is_unbounded:
        if p < ratio:
            return 1.0
    else:
        root = aloha.solve_q_hat(p, params.energy.B, ratio)
        if root is None or root >= 1.0 - 1e-12:
            return 1.0
    opt = aloha.optimal_q(params)
    sne_capacity = params.lam * throughput(1.0, 1.0, params)
    return opt.capacity / sne_capacity


def sne(params: NetworkParams) -> SneResult:
    """Symmetric Nash equilibria and the resulting capacity.

    [p, 1] for an unbounded battery (all plateau points), {1} for finite B.
    Either way the per-node throughput is p*exp(-p*lambda/lambda_max)*rate.
    """
    if params.energy.is_unbounded:
        q_lo, q_hi = params.energy.p, 1.0
    else:
        q_lo, q_hi = 1.0, 1.0
    th = throughput(q_hi, q_hi, params)
    return SneResult(
        q_lo=q_lo,
        q_hi=q_hi,
        per_node_throughput=th,
        capacity_at_sne=params.lam * th,
        poa=price_of_anarchy(params),
    )

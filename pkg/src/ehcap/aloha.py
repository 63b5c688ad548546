"""ALOHA success probability, transmission capacity, and optimal access.

Capacity at access probability q is lambda_a * exp(-lambda_a/lambda_max) * rate
with active density lambda_a = q*r*lambda.  The optimum is q = lambda_max/lambda
when reachable (unbounded battery), or the root of f_B(q) = lambda_max/lambda
for a finite battery, clamped to 1 when the root is not bracketed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import energy_queue
from .model import NetworkParams, derive_channel
from .numerics import find_root_increasing


@dataclass(frozen=True)
class AlohaResult:
    q: float
    r: float
    active_density: float
    p_suc: float
    capacity: float


@dataclass(frozen=True)
class OptimalAccess:
    """An optimal access probability: a point (q_lo == q_hi) or a closed
    interval of equally optimal values."""

    q_lo: float
    q_hi: float
    capacity: float

    def __post_init__(self):
        if not (0.0 <= self.q_lo <= self.q_hi <= 1.0):
            raise ValueError(f"invalid interval [{self.q_lo}, {self.q_hi}]")

    @property
    def is_point(self) -> bool:
        return self.q_lo == self.q_hi

    @property
    def q(self) -> float:
        """Representative optimum (lower endpoint for intervals)."""
        return self.q_lo


def evaluate(params: NetworkParams, q: float) -> AlohaResult:
    """Success probability and capacity of the network at access probability q."""
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"q must be in [0, 1], got {q}")
    der = derive_channel(params.channel)
    occ = energy_queue.occupancy(params.energy.p, q, params.energy.B)
    lam_a = occ.effective_access * params.lam
    p_suc = math.exp(-lam_a / der.lambda_max)
    return AlohaResult(
        q=q,
        r=occ.r,
        active_density=lam_a,
        p_suc=p_suc,
        capacity=lam_a * p_suc * der.rate,
    )


def solve_q_hat(p: float, B: float, target: float, tol: float = 1e-13) -> Optional[float]:
    """Root of f_B(q) = target on [0, 1], or None when target > f_B(1) = p.

    f_B is monotone nondecreasing, so bisection brackets reliably.
    """
    return find_root_increasing(
        lambda q: energy_queue.effective_access(p, q, B), target, 0.0, 1.0, tol
    )


def optimal_q_infinite(params: NetworkParams) -> OptimalAccess:
    """Unbounded battery optimum.

    Point lambda_max/lambda when p > lambda_max/lambda; otherwise every
    q in [p, 1] is optimal (the capacity plateaus once q >= p).
    """
    if not params.energy.is_unbounded:
        raise ValueError("optimal_q_infinite requires an unbounded battery")
    der = derive_channel(params.channel)
    ratio = der.lambda_max / params.lam
    p = params.energy.p
    if p > ratio:  # implies ratio < 1 since p <= 1
        return OptimalAccess(ratio, ratio, evaluate(params, ratio).capacity)
    return OptimalAccess(p, 1.0, evaluate(params, p).capacity)


def optimal_q_finite(params: NetworkParams) -> OptimalAccess:
    """Finite battery optimum: q* = min(q_hat, 1) with f_B(q_hat) = lambda_max/lambda."""
    if params.energy.is_unbounded:
        raise ValueError("optimal_q_finite requires a finite battery")
    der = derive_channel(params.channel)
    target = der.lambda_max / params.lam
    q_hat = solve_q_hat(params.energy.p, params.energy.B, target)
    q_star = 1.0 if q_hat is None else q_hat
    return OptimalAccess(q_star, q_star, evaluate(params, q_star).capacity)


def optimal_q(params: NetworkParams) -> OptimalAccess:
    """Dispatch on battery capacity."""
    if params.energy.is_unbounded:
        return optimal_q_infinite(params)
    return optimal_q_finite(params)


def unit_battery_optimal_q(p: float, lam: float, lambda_max: float) -> float:
    """Closed-form optimum for B = 1.

    Solving f_1(q) = p*q/(p+q-pq) = lambda_max/lambda for q gives
    q = lambda_max*p / (lambda*p - lambda_max*(1-p)); clamped to 1 when the
    root exceeds 1 or the denominator is nonpositive (f_1(1) = p below the
    target, so the capacity is still rising at q = 1).
    """
    den = lam * p - lambda_max * (1.0 - p)
    if den <= 0.0:
        return 1.0
    return min(lambda_max * p / den, 1.0)


def unit_battery_optimal_q_uncorrected(p: float, lam: float, lambda_max: float) -> float:
    """Sign-flipped variant min(p*lambda_max/(lambda*p + lambda_max*(1-p)), 1).

    This form circulates for the B = 1 optimum but does not satisfy the
    defining equation f_1(q) = lambda_max/lambda; it is exposed only so the
    verification harness can demonstrate the failure.
    """
    return min(p * lambda_max / (lam * p + lambda_max * (1.0 - p)), 1.0)

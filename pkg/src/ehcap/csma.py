"""CSMA back-off and outage probabilities, and the resulting capacity.

Packets arrive in time as a Poisson stream with per-slot spatial density
lam/L, each lasting L slots; a transmitter senses at its start slot and backs
off when SIR < theta.  Back-off events across transmitters are treated as
independent, so the active interferers in any slot form a Poisson field of
density lam*(1-P_b)*r, where r = min(p/(1-P_b), 1) is the stationary energy
occupancy at attempt rate 1-P_b.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Tuple

from .model import NetworkParams, derive_channel
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    alternating_binomial_sum,
    csma_spatial_integral,
    lambert_w0,
)

FIXED_POINT_TOL = 1e-10


class BackoffBranch(enum.Enum):
    # the effective transmit rate (1-P_b)*r equals the arrival rate p (r < 1)
    HIGH_ENERGY = "high-energy"
    # the battery is essentially always charged (r = 1); the fixed point is
    # solved through the Lambert W function
    ENERGY_LIMITED = "energy-limited"


@dataclass(frozen=True)
class CsmaParams:
    network: NetworkParams
    L: int  # packet duration in slots

    def __post_init__(self):
        if self.L < 1 or self.L != int(self.L):
            raise ValueError(f"L must be a positive integer, got {self.L}")


@dataclass(frozen=True)
class CsmaResult:
    p_b: float
    branch: BackoffBranch
    r: float
    p_fail_given_no_backoff: float
    p_out: float
    fkg_bound: float
    capacity: float


def backoff_probability(params: CsmaParams) -> Tuple[float, BackoffBranch]:
    """Self-consistent back-off probability P_b = 1 - exp(-lam*(1-P_b)*r/lambda_max).

    When -lambda_max*ln(p)/lam > p the solution has (1-P_b)*r = p, giving the
    closed form P_b = 1 - exp(-p*lam/lambda_max).  Otherwise r = 1 and
    y = 1 - P_b solves y = exp(-lam*y/lambda_max), i.e.
    y = (lambda_max/lam) * W0(lam/lambda_max).
    """
    net = params.network
    der = derive_channel(net.channel)
    p, lam, lmax = net.energy.p, net.lam, der.lambda_max
    if not net.energy.is_unbounded:
        raise ValueError("the CSMA analysis covers the unbounded-battery model")
    if -lmax * math.log(p) / lam > p:
        return 1.0 - math.exp(-p * lam / lmax), BackoffBranch.HIGH_ENERGY
    y = (lmax / lam) * lambert_w0(lam / lmax)
    return 1.0 - y, BackoffBranch.ENERGY_LIMITED


def _occupancy_at_backoff(p: float, p_b: float) -> float:
    if p_b >= 1.0:
        return 1.0
    return min(p / (1.0 - p_b), 1.0)


def failure_probability(
    params: CsmaParams,
    p_b: float,
    r: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Conditional packet-failure probability given the sensing slot succeeded.

    The observation window spans the sensing slot plus the L transmission
    slots.  An interferer cohort arriving c slots after the sensing slot
    (c = 1-L .. L) overlaps the window in ell_c consecutive slots, each
    overlap count 1..L occurring for exactly two cohorts.  Cohorts are
    independent Poisson fields of density lam*nu/L with nu = (1-P_b)*r, and
    an active packet transmits through its whole window with fresh per-slot
    fading, so

        ln P(all window slots succeed) = -(lam*nu/L) * sum_c K(ell_c),

    with K(ell) the full-activity radial integral; conditioning on the
    sensing slot removes exp(-lam*nu*K(1)).  The result lies in (0, 1) and
    respects P_fail <= 1 - (1-P_b)^L structurally, because K is subadditive
    (K(ell) <= ell*K(1)).
    """
    nu = (1.0 - p_b) * r
    if nu <= 0.0:
        return 0.0  # no interferers ever, no failure
    L = params.L
    ch = params.network.channel
    lam = params.network.lam
    K = [csma_spatial_integral(ell, 1.0, ch, spec) for ell in range(1, L + 1)]
    exponent = lam * nu * (K[0] - (2.0 / L) * math.fsum(K))
    return -math.expm1(exponent)


def failure_probability_alt_series(
    params: CsmaParams,
    p_b: float,
    r: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> Tuple[float, bool]:
    """Alternating binomial-sum construction of the conditional failure.

    Evaluates 1 - sum_{l=0..L+1} (-1)^l C(L+1,l) exp(-(lam/L)*I(l, nu)) / (1-P_b)
    with I the partial-activity radial integral.  By inclusion-exclusion the
    sum equals the probability that every window slot fails for a static
    Poisson field with per-slot activity nu, so the expression does not
    reduce to a conditional failure probability (it tends to 1, not 0, as
    lam -> 0).  Kept for diagnostic comparison only; never feeds p_out.

    Returns (value clamped to [0, 1], clamped_flag).
    """
    nu = (1.0 - p_b) * r
    if nu <= 0.0:
        return 0.0, False
    L = params.L
    if L > 16:
        warnings.warn(
            f"alternating sum at L={L} > 16 loses precision to cancellation",
            RuntimeWarning,
            stacklevel=2,
        )
    ch = params.network.channel
    lam = params.network.lam
    terms = [
        math.exp(-(lam / L) * csma_spatial_integral(ell, nu, ch, spec))
        for ell in range(0, L + 2)
    ]
    value = 1.0 - alternating_binomial_sum(terms) / (1.0 - p_b)
    clamped = not (0.0 <= value <= 1.0)
    return min(max(value, 0.0), 1.0), clamped


def failure_probability_l1_closed_form(
    params: CsmaParams, p_b: float, r: float
) -> Tuple[float, bool]:
    """Single-slot closed form 1 - (1-P_b) * exp(+2*lam*theta^(2/a)*d^2*nu^2*pi^2*((a-2)/a)*csc(2*pi/a)).

    Evaluated verbatim for comparison; the exponent is positive for a > 2,
    so the implied conditional success probability can exceed 1 at larger
    densities.  Returns (value clamped to [0, 1], clamped_flag).
    """
    if params.L != 1:
        raise ValueError("closed form applies to L = 1 only")
    ch = params.network.channel
    lam = params.network.lam
    a = ch.alpha
    nu = (1.0 - p_b) * r
    exponent = (
        2.0
        * lam
        * ch.theta ** (2.0 / a)
        * ch.d**2
        * nu**2
        * math.pi**2
        * ((a - 2.0) / a)
        / math.sin(2.0 * math.pi / a)
    )
    value = 1.0 - (1.0 - p_b) * math.exp(exponent)
    clamped = not (0.0 <= value <= 1.0)
    return min(max(value, 0.0), 1.0), clamped


def evaluate_csma(params: CsmaParams, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> CsmaResult:
    """Compose back-off, conditional failure, outage, FKG bound and capacity."""
    net = params.network
    der = derive_channel(net.channel)
    p = net.energy.p
    p_b, branch = backoff_probability(params)
    r = _occupancy_at_backoff(p, p_b)

    # self-consistency of the fixed point, both branches
    residual = abs(p_b - (-math.expm1(-net.lam * (1.0 - p_b) * r / der.lambda_max)))
    assert residual <= FIXED_POINT_TOL, f"back-off fixed point residual {residual}"
    if branch is BackoffBranch.HIGH_ENERGY:
        assert p_b <= 1.0 - p + 1e-12, "high-energy branch requires P_b <= 1-p"
    else:
        assert 1.0 - p_b <= p + 1e-12, "energy-limited branch requires 1-P_b <= p"

    p_fail = failure_probability(params, p_b, r, spec)
    p_out = p_b + (1.0 - p_b) * p_fail
    fkg_bound = 1.0 - (1.0 - p_b) ** (params.L + 1)
    assert p_out <= fkg_bound + 1e-9, f"outage {p_out} above FKG bound {fkg_bound}"
    return CsmaResult(
        p_b=p_b,
        branch=branch,
        r=r,
        p_fail_given_no_backoff=p_fail,
        p_out=p_out,
        fkg_bound=fkg_bound,
        capacity=net.lam * (1.0 - p_out) * der.rate,
    )

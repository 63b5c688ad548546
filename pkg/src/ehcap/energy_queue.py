"""Stationary occupancy of the per-transmitter energy queue.

The queue is a birth-death chain driven by Bernoulli(p) energy arrivals and
Bernoulli(q) transmission attempts (an attempt consumes one unit when the
queue is non-empty).  Transitions: from 0 up with p; in the interior up with
p(1-q), down with q(1-p); at a finite cap B an arrival into a full battery
is lost unless a simultaneous transmission frees the slot.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# below this |p - q| the p = q closed form takes over; the chain oracle
# pins the adequacy of the threshold
P_EQ_Q_EPS = 1e-9


@dataclass(frozen=True)
class QueueOccupancy:
    """r = P(energy level >= 1); effective_access = unconditional per-slot
    transmit probability q*r, bounded by min(p, q)."""

    r: float
    effective_access: float


def _validate(p: float, q: float) -> None:
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must be in (0, 1], got {p}")
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"q must be in [0, 1], got {q}")


def occupancy_infinite(p: float, q: float) -> QueueOccupancy:
    """Unbounded battery: r = min(p/q, 1); r = 1 by convention at q = 0.

    The effective access probability is min(p, q) exactly (output rate can
    never exceed the arrival rate).
    """
    _validate(p, q)
    if q == 0.0:
        return QueueOccupancy(r=1.0, effective_access=0.0)
    return QueueOccupancy(r=min(p / q, 1.0), effective_access=min(p, q))


def _r_finite(p: float, q: float, B: int) -> float:
    if p >= 1.0:
        return 1.0  # always recharged; general formula has a (1-p) denominator
    if q <= 0.0:
        return 1.0  # never drains; limit of the general formula
    if abs(p - q) < P_EQ_Q_EPS:
        return B / (B + 1.0 - p)
    if q >= 1.0:
        return p  # rho = 0: every non-empty slot transmits, r = p exactly
    # r_B = (p/q) (1 - rho^B) / (1 - (p/q) rho^B),  rho = p(1-q)/(q(1-p)).
    # Both differences are evaluated through expm1/log1p on rho - 1 =
    # (p - q)/(q(1-p)), which stays fully accurate near p = q; for rho > 1
    # the form divided by rho^B avoids overflow at large B.
    rho_m1 = (p - q) / (q * (1.0 - p))
    t = B * math.log1p(rho_m1)
    pq_log = math.log1p((p - q) / q)  # log(p/q)
    if t <= 0.0:
        num = -math.expm1(t)
        den = -math.expm1(pq_log + t)
    else:
        # rho > 1: divide both differences by rho^B so nothing overflows
        inv = math.exp(-t)
        num = inv - 1.0
        den = inv - math.exp(pq_log)
    return (p / q) * num / den


def occupancy_finite(p: float, q: float, B: int) -> QueueOccupancy:
    """Battery of capacity B >= 1: stationary P(E >= 1) of the (B+1)-state chain.

    Uses the closed forms p/(p+q-pq) (B = 1 reduces to it), the geometric-ratio
    expression for general B, and B/(B+1-p) when |p - q| < 1e-9.
    """
    _validate(p, q)
    B = int(B)
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    r = _r_finite(p, q, B)
    return QueueOccupancy(r=r, effective_access=q * r)


def occupancy_finite_oracle(p: float, q: float, B: int) -> QueueOccupancy:
    """Direct linear solve of the (B+1)-state chain; verification oracle.

    Builds the transition matrix row by row and solves pi P = pi with
    sum(pi) = 1.  Raises on the degenerate p = 0 chain.
    """
    if p <= 0.0:
        raise ValueError("degenerate chain: p = 0 has no energy inflow")
    _validate(p, q)
    B = int(B)
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    n = B + 1
    P = np.zeros((n, n))
    P[0, 0] = 1.0 - p
    P[0, min(1, B)] += p
    up = p * (1.0 - q)
    down = q * (1.0 - p)
    for i in range(1, B):
        P[i, i + 1] = up
        P[i, i - 1] = down
        P[i, i] = 1.0 - up - down
    if B >= 1:
        P[B, B - 1] = down
        P[B, B] += 1.0 - down
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    r = float(1.0 - pi[0])
    return QueueOccupancy(r=r, effective_access=q * r)


def occupancy(p: float, q: float, B: float) -> QueueOccupancy:
    """Dispatch on battery capacity: math.inf selects the unbounded chain."""
    if math.isinf(B):
        return occupancy_infinite(p, q)
    return occupancy_finite(p, q, int(B))


def effective_access(p: float, q: float, B: float) -> float:
    """f_B(q) = q * r_B: the per-slot unconditional transmit probability.

    Nondecreasing in q on [0, 1], with f_B(1) = p exactly.
    """
    return occupancy(p, q, B).effective_access

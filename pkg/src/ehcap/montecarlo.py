"""Seeded Monte Carlo oracles for the closed forms.

Estimators share a few design rules:

* The sampling window is a disc centered on the typical receiver.  Points
  beyond the window are not dropped: their aggregate interference is added
  as its exact mean (Campbell's formula, density * 2*pi*R^(2-alpha)/(alpha-2)),
  so the truncation bias is second order in the far-field fluctuation
  (~1e-6 at the default window) instead of first order in the removed mean.
* All randomness flows from one integer seed through numpy SeedSequence
  spawning, with a fixed internal batch size, so estimates are bit-stable
  and independent of how batches would be scheduled.
* Success counts are integers; reductions are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import energy_queue
from .csma import CsmaParams
from .model import ChannelParams, NetworkParams, derive_channel
from .numerics import lambert_w0

_BATCH = 1 << 14  # trials per spawned RNG stream


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run parameters.

    window_radius=None resolves to 25 * max(d, d*theta^(1/alpha)); explicit
    values must be at least 20x that scale.  confidence multiplies reported
    intervals in human-facing output (estimates always carry 1-sigma
    std_error).
    """

    trials: int = 100_000
    slots: int = 1_000_000
    seed: int = 0
    window_radius: Optional[float] = None
    confidence: float = 3.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.slots < 1:
            raise ValueError(f"slots must be >= 1, got {self.slots}")
        if self.confidence <= 0:
            raise ValueError("confidence must be positive")


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int


def resolve_window_radius(config: SimConfig, channel: ChannelParams) -> float:
    """Window radius from config, validated against the interference scale."""
    base = max(channel.d, channel.d * channel.theta ** (1.0 / channel.alpha))
    if config.window_radius is None:
        return 25.0 * base
    if config.window_radius < 20.0 * base:
        raise ValueError(
            f"window_radius {config.window_radius} below 20*max(d, d*theta^(1/alpha)) = {20.0 * base}"
        )
    return float(config.window_radius)


def far_field_mean(density: float, radius: float, alpha: float) -> float:
    """Mean of sum |x|^-alpha * E over a unit-mean-marked PPP outside the disc."""
    return density * 2.0 * math.pi * radius ** (2.0 - alpha) / (alpha - 2.0)


def sample_ppp(density: float, window_radius: float, rng: np.random.Generator) -> np.ndarray:
    """Points of a homogeneous PPP on the disc of the given radius, shape (N, 2)."""
    if density < 0:
        raise ValueError(f"density must be >= 0, got {density}")
    n = rng.poisson(density * math.pi * window_radius**2)
    radii = window_radius * np.sqrt(rng.random(n))
    angles = 2.0 * math.pi * rng.random(n)
    return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))


def typical_sir(
    interferers: np.ndarray,
    active_marks: np.ndarray,
    channel: ChannelParams,
    rng: np.random.Generator,
) -> float:
    """One SIR snapshot at the typical receiver (origin), own link at distance d.

    Fading powers are fresh unit-mean exponentials.  Returns math.inf when no
    interferer is active, which counts as success against any finite theta.
    """
    pts = np.asarray(interferers, dtype=float).reshape(-1, 2)
    marks = np.asarray(active_marks, dtype=bool)
    own = channel.d ** (-channel.alpha) * rng.standard_exponential()
    active = pts[marks]
    if active.shape[0] == 0:
        return math.inf
    dist = np.hypot(active[:, 0], active[:, 1])
    interference = float(np.sum(dist ** (-channel.alpha) * rng.standard_exponential(len(dist))))
    if interference == 0.0:
        return math.inf
    return own / interference


def _batch_sizes(trials: int):
    full, rem = divmod(trials, _BATCH)
    return [_BATCH] * full + ([rem] if rem else [])


def _thinned_interference(
    rng: np.random.Generator,
    n: int,
    density: float,
    thinning: float,
    r_in: float,
    r_out: float,
    alpha: float,
) -> np.ndarray:
    """Per-trial sum |x|^-alpha * E over an annulus PPP after Bernoulli thinning.

    Counts are drawn at the full density and thinned binomially (only the
    retained points get positions), which is distribution-identical to
    sampling each point and marking it.
    """
    area = math.pi * (r_out**2 - r_in**2)
    totals = rng.poisson(density * area, n)
    kept = rng.binomial(totals, thinning) if thinning < 1.0 else totals
    m = int(kept.sum())
    idx = np.repeat(np.arange(n), kept)
    # uniform in area: radius^2 ~ U(r_in^2, r_out^2); |x|^-alpha = (r^2)^(-alpha/2)
    r_sq = r_in**2 + rng.random(m) * (r_out**2 - r_in**2)
    contrib = r_sq ** (-0.5 * alpha) * rng.standard_exponential(m)
    return np.bincount(idx, weights=contrib, minlength=n)


def simulate_energy_queue(
    p: float,
    q: float,
    B: float,
    slots: int,
    seed: int = 0,
    burn_in: int = 1000,
    chains: Optional[int] = None,
) -> SimEstimate:
    """Temporal simulation of the energy chain; returns the empirical P(E >= 1).

    The slot budget is split over independent parallel chains (each with its
    own burn-in prefix, discarded); the standard error comes from the spread
    of per-chain means, which handles the slot-to-slot correlation the same
    way batch means would.
    """
    if not (0.0 < p <= 1.0) or not (0.0 <= q <= 1.0):
        raise ValueError("p in (0,1], q in [0,1] required")
    if chains is None:
        chains = int(min(2048, max(32, slots // 5_000)))
    per_chain = max(1, slots // chains)
    cap = None if math.isinf(B) else int(B)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    state = np.zeros(chains, dtype=np.int64)
    occupied = np.zeros(chains, dtype=np.int64)
    for t in range(burn_in + per_chain):
        if t >= burn_in:
            occupied += state >= 1
        arrive = rng.random(chains) < p
        attempt = rng.random(chains) < q
        serve = attempt & (state >= 1)
        state += arrive
        state -= serve
        if cap is not None:
            np.minimum(state, cap, out=state)
    means = occupied / per_chain
    std_error = float(means.std(ddof=1) / math.sqrt(chains)) if chains > 1 else 0.0
    return SimEstimate(float(means.mean()), std_error, chains * per_chain, seed)


def estimate_aloha_psuc(params: NetworkParams, q: float, config: SimConfig) -> SimEstimate:
    """Empirical P(SIR > theta) under ALOHA access probability q.

    Transmitters are a PPP(lambda) on the window, each active independently
    with probability q*r (stationary occupancy from the energy queue); the
    SIR test draws fresh Rayleigh fading for the own link and every active
    interferer.
    """
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"q must be in [0, 1], got {q}")
    ch = params.channel
    radius = resolve_window_radius(config, ch)
    occ = energy_queue.occupancy(params.energy.p, q, params.energy.B)
    qr = occ.effective_access
    threshold = ch.theta * ch.d**ch.alpha
    far = far_field_mean(params.lam * qr, radius, ch.alpha)
    successes = 0
    ss = np.random.SeedSequence(config.seed)
    children = ss.spawn(len(_batch_sizes(config.trials)))
    for child, n in zip(children, _batch_sizes(config.trials)):
        rng = np.random.default_rng(child)
        interference = _thinned_interference(rng, n, params.lam, qr, 0.0, radius, ch.alpha)
        own = rng.standard_exponential(n)
        successes += int(np.count_nonzero(own > threshold * (interference + far)))
    mean = successes / config.trials
    std_error = math.sqrt(max(mean * (1.0 - mean), 0.0) / config.trials)
    return SimEstimate(mean, std_error, config.trials, config.seed)


def aloha_psuc_paired_windows(
    params: NetworkParams, q: float, config: SimConfig
) -> Tuple[SimEstimate, SimEstimate]:
    """P_suc estimates at the window radius and at twice the radius.

    Both estimates share the per-trial draws inside the base window; the
    doubled window adds an independently sampled annulus, a valid
    superposition of the larger PPP.  Shared draws make the difference of
    the two means a direct probe of the truncation treatment, free of
    between-run noise.
    """
    ch = params.channel
    radius = resolve_window_radius(config, ch)
    occ = energy_queue.occupancy(params.energy.p, q, params.energy.B)
    qr = occ.effective_access
    threshold = ch.theta * ch.d**ch.alpha
    far_near = far_field_mean(params.lam * qr, radius, ch.alpha)
    far_wide = far_field_mean(params.lam * qr, 2.0 * radius, ch.alpha)
    succ_near = 0
    succ_wide = 0
    ss = np.random.SeedSequence(config.seed)
    children = ss.spawn(len(_batch_sizes(config.trials)))
    for child, n in zip(children, _batch_sizes(config.trials)):
        rng = np.random.default_rng(child)
        base = _thinned_interference(rng, n, params.lam, qr, 0.0, radius, ch.alpha)
        annulus = _thinned_interference(rng, n, params.lam, qr, radius, 2.0 * radius, ch.alpha)
        own = rng.standard_exponential(n)
        succ_near += int(np.count_nonzero(own > threshold * (base + far_near)))
        succ_wide += int(np.count_nonzero(own > threshold * (base + annulus + far_wide)))
    out = []
    for s in (succ_near, succ_wide):
        mean = s / config.trials
        out.append(
            SimEstimate(
                mean,
                math.sqrt(max(mean * (1.0 - mean), 0.0) / config.trials),
                config.trials,
                config.seed,
            )
        )
    return out[0], out[1]


def _csma_slot0_successes(
    lam: float,
    nu: float,
    radius: float,
    ch: ChannelParams,
    trials: int,
    seed_seq: np.random.SeedSequence,
) -> int:
    """Sensing-slot successes: active interferers at one slot are the
    superposition of the L covering cohorts, a PPP of density lam*nu."""
    threshold = ch.theta * ch.d**ch.alpha
    far = far_field_mean(lam * nu, radius, ch.alpha)
    successes = 0
    children = seed_seq.spawn(len(_batch_sizes(trials)))
    for child, n in zip(children, _batch_sizes(trials)):
        rng = np.random.default_rng(child)
        interference = _thinned_interference(rng, n, lam, nu, 0.0, radius, ch.alpha)
        own = rng.standard_exponential(n)
        successes += int(np.count_nonzero(own > threshold * (interference + far)))
    return successes


def _csma_window_counts(
    lam: float,
    nu: float,
    L: int,
    radius: float,
    ch: ChannelParams,
    trials: int,
    seed_seq: np.random.SeedSequence,
) -> Tuple[int, int, int, int]:
    """Tagged-link counts over the sensing slot plus L transmission slots.

    Interferer packets arrive per cohort c = 1-L..L as PPP(lam/L) counts,
    thinned by the activity probability nu; an active packet transmits over
    its whole L-slot window with fresh per-slot fading.  Returns
    (backoffs, transmissions, failures_among_transmissions, outages).
    """
    alpha = ch.alpha
    threshold = ch.theta * ch.d**alpha
    area = math.pi * radius**2
    far = far_field_mean(lam * nu, radius, alpha)
    backoffs = transmissions = failures = outages = 0
    children = seed_seq.spawn(len(_batch_sizes(trials)))
    for child, n in zip(children, _batch_sizes(trials)):
        rng = np.random.default_rng(child)
        interference = np.zeros((L + 1, n))
        for c in range(1 - L, L + 1):
            first, last = max(c, 0), min(c + L - 1, L)
            totals = rng.poisson(lam / L * area, n)
            kept = rng.binomial(totals, nu) if nu < 1.0 else totals
            m = int(kept.sum())
            idx = np.repeat(np.arange(n), kept)
            g = (radius**2 * rng.random(m)) ** (-0.5 * alpha)
            for t in range(first, last + 1):
                interference[t] += np.bincount(
                    idx, weights=g * rng.standard_exponential(m), minlength=n
                )
        own = rng.standard_exponential((L + 1, n))
        success = own > threshold * (interference + far)
        sensed = success[0]
        survived = success[1:].all(axis=0)
        failed = sensed & ~survived
        backoffs += int(np.count_nonzero(~sensed))
        transmissions += int(np.count_nonzero(sensed))
        failures += int(np.count_nonzero(failed))
        outages += int(np.count_nonzero(~sensed | failed))
    return backoffs, transmissions, failures, outages


def estimate_csma(
    params: CsmaParams, config: SimConfig
) -> Tuple[SimEstimate, SimEstimate, SimEstimate]:
    """Empirical (P_b, P_fail|no-backoff, P_out) for the tagged CSMA link.

    Two fixed-point sweeps set the interferer operating point.  Sweep one
    runs the sensing slot with every interferer attempting (activity
    min(p, 1)); because simulated interference is a Poisson superposition,
    its success probability is exactly exponential in the activity, so the
    measured exponent pins the self-consistent back-off level: directly when
    the measured back-off stays below 1-p (activity is then p regardless),
    otherwise through the same Lambert inversion applied to the *measured*
    exponent.  Sweep two runs the full window at that operating point and
    reports first-attempt statistics.
    """
    net = params.network
    ch = net.channel
    p = net.energy.p
    radius = resolve_window_radius(config, ch)
    ss = np.random.SeedSequence(config.seed)
    sweep1, sweep2 = ss.spawn(2)

    nu1 = min(p, 1.0)
    s1 = _csma_slot0_successes(net.lam, nu1, radius, ch, config.trials, sweep1) / config.trials
    s1 = min(max(s1, 0.5 / config.trials), 1.0 - 0.5 / config.trials)
    if s1 >= p:
        pb_hat = 1.0 - s1
    else:
        c_hat = -math.log(s1) / nu1
        pb_hat = 1.0 - lambert_w0(c_hat) / c_hat
    nu2 = min(p, 1.0 - pb_hat)

    backoffs, transmissions, failures, outages = _csma_window_counts(
        net.lam, nu2, params.L, radius, ch, config.trials, sweep2
    )
    n = config.trials
    p_b = backoffs / n
    p_out = outages / n
    p_fail = failures / transmissions if transmissions else 0.0
    est_pb = SimEstimate(p_b, math.sqrt(max(p_b * (1 - p_b), 0.0) / n), n, config.seed)
    est_pfail = SimEstimate(
        p_fail,
        math.sqrt(max(p_fail * (1 - p_fail), 0.0) / max(transmissions, 1)),
        transmissions,
        config.seed,
    )
    est_pout = SimEstimate(p_out, math.sqrt(max(p_out * (1 - p_out), 0.0) / n), n, config.seed)
    return est_pb, est_pfail, est_pout

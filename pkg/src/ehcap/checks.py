"""Verification checks: every closed form against an independent route.

Each check returns rows with an analytic value, the independent observation
(simulation, chain solve, grid search, ...), a scale for the comparison and
a verdict.  The pytest acceptance module asserts these rows; the ``verify``
CLI subcommand prints them.  Verdicts:

PASS / FAIL  - asserted comparisons
XFAIL        - a requirement that is provably unsatisfiable as stated
               (kept visible, not counted as a failure; see the note)
INFO         - logged three-way comparisons that carry no pass/fail weight
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import aloha, csma, energy_queue, game, montecarlo
from .model import UNBOUNDED, ChannelParams, EnergyModel, NetworkParams, derive_channel
from .montecarlo import SimConfig
from .numerics import csma_spatial_integral

CHANNEL_SMALL = ChannelParams(alpha=3.0, theta=1.0, d=1.0)
CHANNEL_REF = ChannelParams(alpha=3.0, theta=2.0, d=2.0)


@dataclass
class CheckRow:
    name: str
    analytic: Optional[float]
    observed: Optional[float]
    scale: Optional[float]  # stderr for MC rows, tolerance otherwise
    verdict: str
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.verdict == "FAIL"


def _row(name, analytic, observed, scale, ok, note="", expected_fail=False) -> CheckRow:
    if expected_fail:
        verdict = "XFAIL" if not ok else "FAIL"  # an XFAIL that passes is an alarm
    else:
        verdict = "PASS" if ok else "FAIL"
    return CheckRow(name, analytic, observed, scale, verdict, note)


def _info(name, analytic, observed, scale=None, note="") -> CheckRow:
    return CheckRow(name, analytic, observed, scale, "INFO", note)


def _net(lam, p, B, channel) -> NetworkParams:
    return NetworkParams(lam, channel, EnergyModel(p, B))


# --------------------------------------------------------------------------
# 1. energy-queue closed forms vs chain oracle


def check_queue_oracle(seed: int = 0, **_) -> List[CheckRow]:
    triples = []
    for B in (1, 2, 3, 5, 10):
        for p in (0.1, 0.2, 0.3, 0.45, 0.5, 0.6, 0.7, 0.8, 0.9):
            for q in (0.15, 0.5, 0.85, p, p + 1e-6 if p < 1 else p):
                triples.append((p, min(q, 1.0), B))
    for p in (0.2, 0.5, 0.8):
        triples.append((p, p + 1e-12, 3))
        triples.append((p, p - 1e-7, 3))
    worst = 0.0
    for p, q, B in triples:
        closed = energy_queue.occupancy_finite(p, q, B).r
        oracle = energy_queue.occupancy_finite_oracle(p, q, B).r
        worst = max(worst, abs(closed - oracle))
    return [
        _row(
            "queue-closed-form-vs-oracle",
            0.0,
            worst,
            1e-10,
            worst <= 1e-10,
            note=f"max |closed-oracle| over {len(triples)} (p,q,B) triples",
        )
    ]


# --------------------------------------------------------------------------
# 2. energy-queue closed forms vs temporal simulation

QUEUE_SIM_TRIPLES = [
    (0.5, 0.5, 5),
    (0.5, 1.0, UNBOUNDED),
    (0.2, 0.8, UNBOUNDED),
    (0.5, 0.3, UNBOUNDED),
    (0.3, 0.7, 1),
    (0.5, 0.5, 1),
    (0.7, 0.4, 2),
    (0.1, 0.9, 10),
    (0.9, 0.95, 3),
    (0.4, 0.6, 5),
    (0.6, 0.9, UNBOUNDED),
    (0.25, 0.75, 2),
    (0.8, 0.5, 4),
    (0.35, 0.35, 7),
    (0.15, 0.6, 1),
    (0.65, 0.85, 6),
    (0.45, 0.2, 3),
    (0.55, 0.95, 8),
    (0.05, 0.5, 2),
    (0.75, 0.6, UNBOUNDED),
]


def check_queue_simulation(seed: int = 0, slots: int = 10_000_000, **_) -> List[CheckRow]:
    rows = []
    for i, (p, q, B) in enumerate(QUEUE_SIM_TRIPLES):
        closed = energy_queue.occupancy(p, q, B).r
        est = montecarlo.simulate_energy_queue(p, q, B, slots, seed=seed * 1000 + i)
        diff = abs(est.mean - closed)
        ok = diff <= 3.0 * est.std_error + 1e-12
        b_str = "inf" if math.isinf(B) else str(int(B))
        rows.append(
            _row(
                f"queue-sim-p{p}-q{q}-B{b_str}",
                closed,
                est.mean,
                est.std_error,
                ok,
                note=f"{est.trials} slots",
            )
        )
    return rows


# --------------------------------------------------------------------------
# 3. monotonicity of the effective access rate


def check_access_monotonicity(**_) -> List[CheckRow]:
    grid = np.linspace(0.0, 1.0, 10_000)
    worst = 0.0
    for B in (1, 2, 5, 10):
        for p in (0.1, 0.3, 0.5, 0.7, 0.9):
            values = [energy_queue.effective_access(p, q, B) for q in grid]
            drops = np.diff(values)
            worst = min(worst, float(drops.min()))
    return [
        _row(
            "access-rate-monotone",
            0.0,
            -worst,
            1e-12,
            -worst <= 1e-12,
            note="largest decrease of f_B over 1e4-point q grids, B in {1,2,5,10}, p in {.1,.3,.5,.7,.9}",
        )
    ]


# --------------------------------------------------------------------------
# 4. ALOHA success probability vs simulation

ALOHA_POINTS = [
    # (lam, p, B, q, channel) spanning both occupancy branches and channels
    (0.1, 0.5, UNBOUNDED, 0.23, CHANNEL_SMALL),
    (0.1, 0.3, UNBOUNDED, 0.6, CHANNEL_SMALL),
    (0.05, 0.5, 1, 1.0, CHANNEL_SMALL),
    (0.1, 0.5, UNBOUNDED, 0.23, CHANNEL_REF),
    (0.02, 0.2, UNBOUNDED, 0.5, CHANNEL_REF),
    (0.05, 0.5, 5, 0.8, CHANNEL_REF),
]


def check_aloha_psuc(seed: int = 0, trials: int = 1_000_000, **_) -> List[CheckRow]:
    rows = []
    for i, (lam, p, B, q, ch) in enumerate(ALOHA_POINTS):
        params = _net(lam, p, B, ch)
        analytic = aloha.evaluate(params, q).p_suc
        est = montecarlo.estimate_aloha_psuc(params, q, SimConfig(trials=trials, seed=seed * 100 + i))
        ok = abs(est.mean - analytic) <= 3.0 * est.std_error
        b_str = "inf" if math.isinf(B) else str(int(B))
        rows.append(
            _row(
                f"aloha-psuc-{i + 1}",
                analytic,
                est.mean,
                est.std_error,
                ok,
                note=f"lam={lam} p={p} B={b_str} q={q} a={ch.alpha} t={ch.theta} d={ch.d}",
            )
        )
    # window-doubling control at the reference point
    params = _net(0.1, 0.5, UNBOUNDED, CHANNEL_REF)
    near, wide = montecarlo.aloha_psuc_paired_windows(
        params, 0.23, SimConfig(trials=100_000, seed=seed * 100 + 99)
    )
    shift = abs(wide.mean - near.mean)
    rows.append(
        _row(
            "aloha-psuc-window-doubling",
            near.mean,
            wide.mean,
            near.std_error,
            shift < near.std_error,
            note="shared-draw shift between window R and 2R",
        )
    )
    return rows


# --------------------------------------------------------------------------
# 5. unbounded-battery optimum vs grid search


def check_optimal_q_infinite(**_) -> List[CheckRow]:
    rows = []
    params = _net(0.1, 0.5, UNBOUNDED, CHANNEL_REF)
    der = derive_channel(CHANNEL_REF)
    ratio = der.lambda_max / 0.1
    grid = np.linspace(0.0, 1.0, 100_000)
    caps = np.array([aloha.evaluate(params, q).capacity for q in grid])
    q_best = float(grid[int(caps.argmax())])
    rows.append(
        _row(
            "optimal-q-inf-grid-argmax",
            ratio,
            q_best,
            1e-3,
            abs(q_best - ratio) <= 1e-3,
            note="1e5-point grid search at lam=0.1",
        )
    )
    params_lo = _net(0.02, 0.5, UNBOUNDED, CHANNEL_REF)
    plateau = [aloha.evaluate(params_lo, q).capacity for q in grid[grid >= 0.5]]
    spread = max(plateau) - min(plateau)
    rows.append(
        _row(
            "optimal-q-inf-plateau-flat",
            0.0,
            spread,
            1e-12,
            spread <= 1e-12,
            note="capacity spread on q in [p, 1] at lam=0.02",
        )
    )
    below = [aloha.evaluate(params_lo, q).capacity for q in grid[grid < 0.5]]
    rows.append(
        _row(
            "optimal-q-inf-plateau-is-max",
            max(plateau),
            max(below),
            None,
            max(below) < max(plateau),
            note="capacity strictly below the plateau for q < p",
        )
    )
    opt = aloha.optimal_q_infinite(params_lo)
    rows.append(
        _row(
            "optimal-q-inf-interval-branch",
            0.5,
            opt.q_lo,
            0.0,
            (opt.q_lo, opt.q_hi) == (0.5, 1.0),
            note="interval [p, 1] returned when p <= lambda_max/lam",
        )
    )
    return rows


# --------------------------------------------------------------------------
# 6. unit-battery optimum: root solve, defining equation, erratum

UNIT_LMAX_REF = 0.023  # rounded reference value used by the published sweep


def check_optimal_q_unit_battery(**_) -> List[CheckRow]:
    rows = []
    p, lam = 0.5, 0.1
    target = UNIT_LMAX_REF / lam
    q_hat = aloha.solve_q_hat(p, 1, target)
    expected = 0.2987012987012987  # = 0.115/0.385, exact rational arithmetic
    rows.append(
        _row(
            "unit-battery-root",
            expected,
            q_hat,
            1e-5,
            q_hat is not None and abs(q_hat - expected) <= 1e-5,
            note="root of f_1(q) = lambda_max/lam at lambda_max=0.023",
        )
    )
    resid = abs(energy_queue.effective_access(p, q_hat, 1) - target)
    rows.append(
        _row("unit-battery-root-residual", 0.0, resid, 1e-10, resid <= 1e-10)
    )
    closed = aloha.unit_battery_optimal_q(p, lam, UNIT_LMAX_REF)
    rows.append(
        _row(
            "unit-battery-closed-form",
            q_hat,
            closed,
            1e-10,
            abs(closed - q_hat) <= 1e-10,
            note="corrected closed form agrees with the root solve",
        )
    )
    rate = 1.0  # cancels in the argmax
    grid = np.linspace(0.0, 1.0, 100_000)
    caps = []
    for q in grid:
        f = energy_queue.effective_access(p, q, 1)
        caps.append(lam * f * math.exp(-lam * f / UNIT_LMAX_REF) * rate)
    q_grid = float(grid[int(np.argmax(caps))])
    rows.append(
        _row(
            "unit-battery-grid-argmax",
            q_hat,
            q_grid,
            1e-3,
            abs(q_grid - q_hat) <= 1e-3,
            note="1e5-point grid search of the capacity",
        )
    )
    unc = aloha.unit_battery_optimal_q_uncorrected(p, lam, UNIT_LMAX_REF)
    unc_resid = abs(energy_queue.effective_access(p, unc, 1) - target)
    rows.append(
        _row(
            "unit-battery-uncorrected-fails-root-check",
            0.18699186991869918,
            unc,
            1e-10,
            abs(unc - 0.18699186991869918) <= 1e-10 and unc_resid > 1e-3,
            note=f"sign-flipped variant misses f_1(q)=target by {unc_resid:.3e}; recorded as erratum",
        )
    )
    return rows


# --------------------------------------------------------------------------
# 7. symmetric equilibria against best-response grid search


def check_sne(**_) -> List[CheckRow]:
    rows = []
    grid = np.linspace(0.0, 1.0, 10_000)
    cases = [("Binf", UNBOUNDED, (0.5, 0.75, 1.0)), ("B1", 1, (1.0,)), ("B5", 5, (1.0,))]
    for label, B, candidates in cases:
        params = _net(0.1, 0.5, B, CHANNEL_REF)
        eq = game.sne(params)
        worst_gain = -math.inf
        for q_star in candidates:
            mine = game.throughput(q_star, q_star, params)
            best = max(game.throughput(q, q_star, params) for q in grid)
            worst_gain = max(worst_gain, best - mine)
        rows.append(
            _row(
                f"sne-no-profitable-deviation-{label}",
                0.0,
                worst_gain,
                1e-12,
                worst_gain <= 1e-12,
                note=f"equilibrium [{eq.q_lo}, {eq.q_hi}], 1e4-point deviation grid",
            )
        )
    return rows


# --------------------------------------------------------------------------
# 8. price of anarchy


def check_poa(**_) -> List[CheckRow]:
    worst_below_one = 0.0
    worst_branch = 0.0
    worst_closed = 0.0
    n_points = 0
    for B in (UNBOUNDED, 1, 5):
        for p in (0.1, 0.3, 0.5, 0.7, 0.9):
            for lam in (0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.5):
                params = _net(lam, p, B, CHANNEL_REF)
                der = derive_channel(CHANNEL_REF)
                ratio = der.lambda_max / lam
                poa = game.price_of_anarchy(params)
                n_points += 1
                worst_below_one = max(worst_below_one, 1.0 - poa)
                if math.isinf(B):
                    trivial = p < ratio
                else:
                    root = aloha.solve_q_hat(p, B, ratio)
                    trivial = root is None or root >= 1.0 - 1e-12
                if trivial:
                    worst_branch = max(worst_branch, abs(poa - 1.0))
                else:
                    closed = der.lambda_max / (math.e * p * lam * math.exp(-p * lam / der.lambda_max))
                    # PoA spans many orders of magnitude over the grid, so the
                    # 1e-10 equality is measured relative to max(1, value)
                    worst_closed = max(worst_closed, abs(poa - closed) / max(1.0, closed))
    return [
        _row("poa-at-least-one", 0.0, worst_below_one, 1e-12, worst_below_one <= 1e-12,
             note=f"{n_points}-point (B, p, lam) grid"),
        _row("poa-trivial-branch-exact", 0.0, worst_branch, 1e-12, worst_branch <= 1e-12,
             note="PoA == 1 whenever the optimum lies in the equilibrium set"),
        _row("poa-matches-closed-form", 0.0, worst_closed, 1e-10, worst_closed <= 1e-10,
             note="ratio of capacities vs lambda_max/(e*p*lam*exp(-p*lam/lambda_max))"),
    ]


# --------------------------------------------------------------------------
# 9. CSMA back-off: branch split, fixed point, simulation

BACKOFF_LAMBDAS = (0.01, 0.035, 0.05, 0.1)
# branch labels asserted by the published sweep; the 0.035 entry contradicts
# the branch condition itself (see the XFAIL note emitted below)
BACKOFF_CLAIMED_HIGH = (0.01, 0.035)


def check_csma_backoff(seed: int = 0, trials: int = 100_000, **_) -> List[CheckRow]:
    rows = []
    der = derive_channel(CHANNEL_REF)
    p = 0.5
    for i, lam in enumerate(BACKOFF_LAMBDAS):
        cp = csma.CsmaParams(_net(lam, p, UNBOUNDED, CHANNEL_REF), 1)
        p_b, branch = csma.backoff_probability(cp)
        r = min(p / (1.0 - p_b), 1.0)
        residual = abs(p_b - (-math.expm1(-lam * (1.0 - p_b) * r / der.lambda_max)))
        rows.append(
            _row(
                f"csma-backoff-residual-lam{lam}",
                0.0,
                residual,
                1e-10,
                residual <= 1e-10,
                note=f"branch={branch.value} p_b={p_b:.6f}",
            )
        )
        claimed_high = lam in BACKOFF_CLAIMED_HIGH
        is_high = branch is csma.BackoffBranch.HIGH_ENERGY
        condition = -der.lambda_max * math.log(p) / lam
        if claimed_high != is_high:
            rows.append(
                _row(
                    f"csma-backoff-branch-lam{lam}",
                    1.0 if claimed_high else 0.0,
                    1.0 if is_high else 0.0,
                    None,
                    False,
                    expected_fail=True,
                    note=(
                        f"stated branch unsatisfiable: condition value {condition:.4f} "
                        f"< p = {p}, so the Lambert branch is forced; the closed-form "
                        f"branch would leave a fixed-point residual of ~5e-2"
                    ),
                )
            )
        else:
            rows.append(
                _row(
                    f"csma-backoff-branch-lam{lam}",
                    1.0 if claimed_high else 0.0,
                    1.0 if is_high else 0.0,
                    None,
                    True,
                    note=f"condition value {condition:.4f} vs p = {p}",
                )
            )
        est_pb, _, _ = montecarlo.estimate_csma(cp, SimConfig(trials=trials, seed=seed * 10 + i))
        ok = abs(est_pb.mean - p_b) <= 3.0 * est_pb.std_error
        rows.append(
            _row(
                f"csma-backoff-sim-lam{lam}",
                p_b,
                est_pb.mean,
                est_pb.std_error,
                ok,
                note=f"{est_pb.trials} tagged-link trials",
            )
        )
    return rows


# --------------------------------------------------------------------------
# 10. quadrature against the single-overlap closed form


def check_quadrature(**_) -> List[CheckRow]:
    pairs = [
        (1.0, CHANNEL_SMALL),
        (0.5, CHANNEL_SMALL),
        (0.1, CHANNEL_SMALL),
        (1.0, CHANNEL_REF),
        (0.7, CHANNEL_REF),
        (0.25, CHANNEL_REF),
        (0.9, ChannelParams(4.0, 1.0, 1.0)),
        (0.33, ChannelParams(2.5, 0.8, 1.5)),
        (0.6, ChannelParams(5.0, 3.0, 0.7)),
        (0.05, ChannelParams(3.5, 2.0, 1.2)),
    ]
    worst = 0.0
    for nu, ch in pairs:
        der = derive_channel(ch)
        closed = nu * ch.d**2 * ch.theta ** (2.0 / ch.alpha) * der.kappa
        quad = csma_spatial_integral(1, nu, ch)
        worst = max(worst, abs(quad - closed) / closed)
    return [
        _row(
            "quadrature-vs-closed-form",
            0.0,
            worst,
            1e-8,
            worst <= 1e-8,
            note="max relative error over 10 (nu, channel) pairs at single overlap",
        )
    ]


# --------------------------------------------------------------------------
# 11. CSMA outage vs simulation, FKG bound, three-way comparison


def check_csma_outage(seed: int = 0, trials: int = 1_000_000, **_) -> List[CheckRow]:
    rows = []
    for L in (1, 2, 4):
        cp = csma.CsmaParams(_net(0.01, 0.5, UNBOUNDED, CHANNEL_REF), L)
        res = csma.evaluate_csma(cp)
        est_pb, est_pfail, est_pout = montecarlo.estimate_csma(
            cp, SimConfig(trials=trials, seed=seed * 10 + L)
        )
        ok_out = abs(est_pout.mean - res.p_out) <= 3.0 * est_pout.std_error
        rows.append(
            _row(
                f"csma-outage-sim-L{L}",
                res.p_out,
                est_pout.mean,
                est_pout.std_error,
                ok_out,
                note=f"{est_pout.trials} trials",
            )
        )
        ok_fail = abs(est_pfail.mean - res.p_fail_given_no_backoff) <= 3.0 * est_pfail.std_error
        rows.append(
            _row(
                f"csma-pfail-sim-L{L}",
                res.p_fail_given_no_backoff,
                est_pfail.mean,
                est_pfail.std_error,
                ok_fail,
            )
        )
        rows.append(
            _row(
                f"csma-outage-fkg-L{L}",
                res.fkg_bound,
                res.p_out,
                1e-9,
                res.p_out <= res.fkg_bound + 1e-9,
                note="analytic outage respects 1-(1-P_b)^(L+1)",
            )
        )
        alt, alt_clamped = csma.failure_probability_alt_series(cp, res.p_b, res.r)
        rows.append(
            _info(
                f"csma-pfail-alt-series-L{L}",
                res.p_fail_given_no_backoff,
                alt,
                est_pfail.std_error,
                note="alternating binomial-sum construction"
                + (" (clamped)" if alt_clamped else "")
                + "; diagnostic only",
            )
        )
        if L == 1:
            cf, cf_clamped = csma.failure_probability_l1_closed_form(cp, res.p_b, res.r)
            rows.append(
                _info(
                    "csma-pfail-l1-closed-form",
                    res.p_fail_given_no_backoff,
                    cf,
                    est_pfail.std_error,
                    note="published single-slot closed form"
                    + (" (clamped)" if cf_clamped else "")
                    + "; diagnostic only",
                )
            )
    return rows


# --------------------------------------------------------------------------
# 12. determinism


def check_determinism(seed: int = 0, **_) -> List[CheckRow]:
    params = _net(0.1, 0.5, UNBOUNDED, CHANNEL_SMALL)
    cfg = SimConfig(trials=20_000, seed=seed)
    a = montecarlo.estimate_aloha_psuc(params, 0.23, cfg)
    b = montecarlo.estimate_aloha_psuc(params, 0.23, cfg)
    cp = csma.CsmaParams(_net(0.02, 0.5, UNBOUNDED, CHANNEL_SMALL), 2)
    ca = montecarlo.estimate_csma(cp, cfg)
    cb = montecarlo.estimate_csma(cp, cfg)
    same = (a == b) and (ca == cb)
    return [
        _row(
            "determinism-bitwise",
            a.mean,
            b.mean,
            0.0,
            same,
            note="identical seeds reproduce bit-identical estimates",
        )
    ]


ALL_CHECKS = [
    ("queue-oracle", check_queue_oracle),
    ("queue-sim", check_queue_simulation),
    ("access-monotone", check_access_monotonicity),
    ("aloha-psuc", check_aloha_psuc),
    ("optimal-q-inf", check_optimal_q_infinite),
    ("optimal-q-unit-battery", check_optimal_q_unit_battery),
    ("sne", check_sne),
    ("poa", check_poa),
    ("csma-backoff", check_csma_backoff),
    ("quadrature", check_quadrature),
    ("csma-outage", check_csma_outage),
    ("determinism", check_determinism),
]


def run_checks(
    seed: int = 42,
    trials: Optional[int] = None,
    slots: Optional[int] = None,
    only: Optional[Sequence[str]] = None,
) -> List[CheckRow]:
    """Run the named checks (all by default) and return their rows.

    trials/slots override each check's spec-level default budget; the
    defaults are 1e6 trials for the ALOHA and CSMA-outage comparisons,
    1e5 for the back-off comparison, and 1e7 slots for the queue runs.
    """
    rows: List[CheckRow] = []
    defaults = {
        "queue-sim": {"slots": slots if slots is not None else 10_000_000},
        "aloha-psuc": {"trials": trials if trials is not None else 1_000_000},
        "csma-backoff": {"trials": trials if trials is not None else 100_000},
        "csma-outage": {"trials": trials if trials is not None else 1_000_000},
    }
    for name, fn in ALL_CHECKS:
        if only and not any(sel in name for sel in only):
            continue
        kwargs = {"seed": seed}
        kwargs.update(defaults.get(name, {}))
        rows.extend(fn(**kwargs))
    return rows

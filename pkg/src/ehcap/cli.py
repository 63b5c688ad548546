"""Command-line surface: parameter sweeps as CSV, point evaluations,
simulation runs, and the verification harness.

Every output embeds the fully resolved parameter set, the seed and the
package version in `#`-prefixed header lines.  Exit codes: 0 success,
1 verification failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__, aloha, checks, csma, energy_queue, game, montecarlo
from .model import (
    UNBOUNDED,
    ChannelParams,
    EnergyModel,
    NetworkParams,
    ValidationError,
    derive_channel,
)
from .montecarlo import SimConfig

DEFAULTS = {
    "lam": 0.1,  # density for the published-style sweeps; see README
    "p": 0.5,
    "q": None,
    "B": UNBOUNDED,
    "alpha": 3.0,
    "theta": 2.0,
    "d": 2.0,
    "L": 1,
    "trials": 100_000,
    "slots": 1_000_000,
    "seed": 0,
    "window_radius": None,
    "points": 200,
}

_CONFIG_KEYS = {
    "lambda": "lam",
    "p": "p",
    "q": "q",
    "B": "B",
    "alpha": "alpha",
    "theta": "theta",
    "d": "d",
    "L": "L",
    "trials": "trials",
    "slots": "slots",
    "seed": "seed",
    "window-radius": "window_radius",
    "window_radius": "window_radius",
    "points": "points",
}

_INT_KEYS = {"L", "trials", "slots", "seed", "points"}


def _parse_battery(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "unbounded"):
        return UNBOUNDED
    value = float(text)
    if value != int(value) or value < 1:
        raise ValueError(f"B must be a positive integer or 'inf', got {text}")
    return value


def _parse_probability(text: str) -> float:
    value = float(text)
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"probability flag out of [0, 1]: {text}")
    return value


def _parse_lambda_list(text: str) -> List[float]:
    """Comma list '0.01,0.05' or range 'lo:hi:n' of densities."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
        if n < 1 or hi < lo:
            raise ValueError(f"bad range spec {text!r}")
        return [float(x) for x in np.linspace(lo, hi, n)]
    return [float(x) for x in text.split(",") if x.strip()]


def _load_config(path: str) -> Dict[str, object]:
    values: Dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            dest = _CONFIG_KEYS[key]
            if dest == "B":
                values[dest] = _parse_battery(val)
            elif dest in _INT_KEYS:
                values[dest] = int(val)
            elif dest == "lam":
                values[dest] = val  # may be a list for csma sweeps
            else:
                values[dest] = float(val)
    return values


def _resolve(args: argparse.Namespace, key: str):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if args._config_values.get(key) is not None:
        return args._config_values[key]
    return DEFAULTS.get(key)


def _resolved_params(args) -> NetworkParams:
    lam = _resolve(args, "lam")
    if isinstance(lam, str):
        values = _parse_lambda_list(lam)
        if len(values) != 1:
            raise ValueError(f"this command needs a single --lambda, got {lam!r}")
        lam = values[0]
    channel = ChannelParams(
        alpha=float(_resolve(args, "alpha")),
        theta=float(_resolve(args, "theta")),
        d=float(_resolve(args, "d")),
    )
    energy = EnergyModel(p=float(_resolve(args, "p")), B=_resolve(args, "B"))
    return NetworkParams(lam=float(lam), channel=channel, energy=energy)


def _header_lines(params: NetworkParams, seed: int, extra: Dict[str, object]) -> List[str]:
    der = derive_channel(params.channel)
    b = "inf" if params.energy.is_unbounded else str(int(params.energy.B))
    lines = [
        f"# ehcap={__version__}",
        f"# lambda={params.lam:.12g}",
        f"# p={params.energy.p:.12g}",
        f"# B={b}",
        f"# alpha={params.channel.alpha:.12g}",
        f"# theta={params.channel.theta:.12g}",
        f"# d={params.channel.d:.12g}",
        f"# lambda_max={der.lambda_max:.12g}",
        f"# kappa={der.kappa:.12g}",
        f"# rate={der.rate:.12g}",
        f"# seed={seed}",
    ]
    lines.extend(f"# {k}={v}" for k, v in extra.items())
    return lines


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _emit(args, lines: Sequence[str]) -> None:
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_aloha(args) -> int:
    params = _resolved_params(args)
    seed = int(_resolve(args, "seed"))
    points = int(_resolve(args, "points"))
    if points < 2:
        raise ValueError(f"--points must be >= 2, got {points}")
    opt = aloha.optimal_q(params)
    marker = (
        f"q_star={opt.q_lo:.12g}"
        if opt.is_point
        else f"q_star_interval=[{opt.q_lo:.12g},{opt.q_hi:.12g}]"
    )
    lines = _header_lines(params, seed, {"sweep": "q", "points": points, "optimum": marker})
    lines.append("q,r,f,lambda_a,p_suc,capacity")
    for q in np.linspace(0.0, 1.0, points):
        occ = energy_queue.occupancy(params.energy.p, float(q), params.energy.B)
        res = aloha.evaluate(params, float(q))
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    res.q,
                    res.r,
                    occ.effective_access,
                    res.active_density,
                    res.p_suc,
                    res.capacity,
                )
            )
        )
    _emit(args, lines)
    return 0


def cmd_csma(args) -> int:
    lam_raw = _resolve(args, "lam")
    lam_list = _parse_lambda_list(str(lam_raw)) if not isinstance(lam_raw, float) else [lam_raw]
    if not lam_list:
        raise ValueError("csma needs a non-empty --lambda list or range")
    seed = int(_resolve(args, "seed"))
    L = int(_resolve(args, "L"))
    channel = ChannelParams(
        float(_resolve(args, "alpha")), float(_resolve(args, "theta")), float(_resolve(args, "d"))
    )
    energy = EnergyModel(p=float(_resolve(args, "p")), B=_resolve(args, "B"))
    params0 = NetworkParams(lam_list[0], channel, energy)
    lines = _header_lines(params0, seed, {"sweep": "lambda", "L": L, "lambdas": len(lam_list)})
    lines.append("lambda,branch,p_b,p_fail,p_out,fkg_bound,capacity")
    for lam in lam_list:
        cp = csma.CsmaParams(NetworkParams(lam, channel, energy), L)
        res = csma.evaluate_csma(cp)
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    lam,
                    res.branch.value,
                    res.p_b,
                    res.p_fail_given_no_backoff,
                    res.p_out,
                    res.fkg_bound,
                    res.capacity,
                )
            )
        )
    _emit(args, lines)
    return 0


def cmd_game(args) -> int:
    seed = int(_resolve(args, "seed"))
    p_raw = getattr(args, "p_list", None)
    if p_raw:
        p_values = [_parse_probability(x) for x in p_raw.split(",") if x.strip()]
    else:
        p_values = [round(0.05 * i, 2) for i in range(1, 20)]
    if not p_values:
        raise ValueError("game needs a non-empty --p-list")
    lam = _resolve(args, "lam")
    if isinstance(lam, str):
        lam = _parse_lambda_list(lam)[0]
    channel = ChannelParams(
        float(_resolve(args, "alpha")), float(_resolve(args, "theta")), float(_resolve(args, "d"))
    )
    B = _resolve(args, "B")
    params0 = NetworkParams(float(lam), channel, EnergyModel(p_values[0], B))
    lines = _header_lines(params0, seed, {"sweep": "p", "points": len(p_values)})
    lines.append("p,q_lo,q_hi,per_node_throughput,capacity_at_sne,optimal_capacity,poa")
    for p in p_values:
        params = NetworkParams(float(lam), channel, EnergyModel(p, B))
        eq = game.sne(params)
        opt = aloha.optimal_q(params)
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    p,
                    eq.q_lo,
                    eq.q_hi,
                    eq.per_node_throughput,
                    eq.capacity_at_sne,
                    opt.capacity,
                    eq.poa,
                )
            )
        )
    _emit(args, lines)
    return 0


def cmd_optimal_q(args) -> int:
    params = _resolved_params(args)
    seed = int(_resolve(args, "seed"))
    opt = aloha.optimal_q(params)
    lines = _header_lines(params, seed, {})
    lines.append("kind,q_lo,q_hi,capacity")
    kind = "point" if opt.is_point else "interval"
    lines.append(",".join(_fmt(v) for v in (kind, opt.q_lo, opt.q_hi, opt.capacity)))
    _emit(args, lines)
    return 0


def cmd_simulate(args) -> int:
    params = _resolved_params(args)
    seed = int(_resolve(args, "seed"))
    trials = int(_resolve(args, "trials"))
    slots = int(_resolve(args, "slots"))
    window = _resolve(args, "window_radius")
    config = SimConfig(
        trials=trials,
        slots=slots,
        seed=seed,
        window_radius=None if window is None else float(window),
    )
    kind = args.kind
    extra = {"simulate": kind, "trials": trials, "slots": slots}
    lines = _header_lines(params, seed, extra)
    if kind == "aloha-psuc":
        q = _resolve(args, "q")
        if q is None:
            raise ValueError("simulate aloha-psuc needs --q")
        est = montecarlo.estimate_aloha_psuc(params, float(q), config)
        analytic = aloha.evaluate(params, float(q)).p_suc
        lines.append("quantity,analytic,simulated,std_error,trials")
        lines.append(
            ",".join(_fmt(v) for v in ("p_suc", analytic, est.mean, est.std_error, est.trials))
        )
    elif kind == "queue":
        q = _resolve(args, "q")
        if q is None:
            raise ValueError("simulate queue needs --q")
        est = montecarlo.simulate_energy_queue(
            params.energy.p, float(q), params.energy.B, slots, seed=seed
        )
        analytic = energy_queue.occupancy(params.energy.p, float(q), params.energy.B).r
        lines.append("quantity,analytic,simulated,std_error,slots")
        lines.append(
            ",".join(_fmt(v) for v in ("r", analytic, est.mean, est.std_error, est.trials))
        )
    elif kind == "csma":
        L = int(_resolve(args, "L"))
        cp = csma.CsmaParams(params, L)
        res = csma.evaluate_csma(cp)
        est_pb, est_pfail, est_pout = montecarlo.estimate_csma(cp, config)
        lines.append("quantity,analytic,simulated,std_error,trials")
        for name, ana, est in (
            ("p_b", res.p_b, est_pb),
            ("p_fail", res.p_fail_given_no_backoff, est_pfail),
            ("p_out", res.p_out, est_pout),
        ):
            lines.append(
                ",".join(_fmt(v) for v in (name, ana, est.mean, est.std_error, est.trials))
            )
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown simulate kind {kind!r}")
    _emit(args, lines)
    return 0


def cmd_verify(args) -> int:
    seed = int(_resolve(args, "seed"))
    trials = getattr(args, "trials", None)
    slots = getattr(args, "slots", None)
    only = args.criterion or None
    rows = checks.run_checks(
        seed=seed,
        trials=None if trials is None else int(trials),
        slots=None if slots is None else int(slots),
        only=only,
    )
    lines = [
        f"# ehcap={__version__} verify",
        f"# seed={seed} trials={'default' if trials is None else trials} "
        f"slots={'default' if slots is None else slots}",
        f"# criteria={'all' if not only else ','.join(only)}",
        f"{'name':<42} {'analytic':>16} {'observed':>16} {'scale':>12} {'verdict':<7} note",
    ]
    for r in rows:
        ana = "-" if r.analytic is None else f"{r.analytic:.10g}"
        obs = "-" if r.observed is None else f"{r.observed:.10g}"
        scale = "-" if r.scale is None else f"{r.scale:.4g}"
        lines.append(f"{r.name:<42} {ana:>16} {obs:>16} {scale:>12} {r.verdict:<7} {r.note}")
    n_pass = sum(r.verdict == "PASS" for r in rows)
    n_fail = sum(r.verdict == "FAIL" for r in rows)
    n_xfail = sum(r.verdict == "XFAIL" for r in rows)
    n_info = sum(r.verdict == "INFO" for r in rows)
    lines.append(f"# summary pass={n_pass} fail={n_fail} xfail={n_xfail} info={n_info}")
    _emit(args, lines)
    return 1 if n_fail else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehcap",
        description="Transmission capacity of energy-harvesting random-access networks",
    )
    parser.add_argument("--version", action="version", version=f"ehcap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, battery=True, sweep_lambda=False):
        sp.add_argument("--config", help="key=value file; explicit flags override it")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int)
        if sweep_lambda:
            sp.add_argument("--lambda", dest="lam", help="comma list or lo:hi:n range")
        else:
            sp.add_argument("--lambda", dest="lam", type=float, help="transmitter density (m^-2)")
        sp.add_argument("--p", type=_parse_probability, help="energy arrival rate")
        sp.add_argument("--alpha", type=float, help="path-loss exponent (> 2)")
        sp.add_argument("--theta", type=float, help="SIR threshold (linear)")
        sp.add_argument("--d", type=float, help="link distance (m)")
        if battery:
            sp.add_argument("--B", type=_parse_battery, help="battery capacity (int or 'inf')")

    sp = sub.add_parser("aloha", help="sweep access probability q, emit capacity CSV")
    add_common(sp)
    sp.add_argument("--points", type=int, help="grid size on [0, 1] (default 200)")
    sp.set_defaults(func=cmd_aloha)

    sp = sub.add_parser("csma", help="sweep density lambda, emit back-off/outage CSV")
    add_common(sp, sweep_lambda=True)
    sp.add_argument("--L", type=int, help="packet duration in slots")
    sp.set_defaults(func=cmd_csma)

    sp = sub.add_parser("game", help="equilibria and price of anarchy over a p grid")
    add_common(sp)
    sp.add_argument("--p-list", dest="p_list", help="comma list of arrival rates")
    sp.set_defaults(func=cmd_game)

    sp = sub.add_parser("optimal-q", help="optimal access probability for the given parameters")
    add_common(sp)
    sp.set_defaults(func=cmd_optimal_q)

    sp = sub.add_parser("simulate", help="run one Monte Carlo estimator")
    add_common(sp)
    sp.add_argument("kind", choices=["aloha-psuc", "queue", "csma"])
    sp.add_argument("--q", type=_parse_probability, help="access probability")
    sp.add_argument("--L", type=int, help="packet duration (csma)")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--slots", type=int)
    sp.add_argument("--window-radius", dest="window_radius", type=float)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="run the verification checks")
    sp.add_argument("--config", help="key=value file; explicit flags override it")
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--trials", type=int, help="override Monte Carlo trial budgets")
    sp.add_argument("--slots", type=int, help="override queue-simulation slot budget")
    sp.add_argument(
        "--criterion",
        action="append",
        help="run only checks whose name contains this substring (repeatable)",
    )
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config_values = _load_config(args.config) if getattr(args, "config", None) else {}
        return args.func(args)
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

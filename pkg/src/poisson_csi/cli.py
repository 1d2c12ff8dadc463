"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .causal import causal_capacity, no_csi_capacity
from .channel import ADVERSARY_STRATEGIES, ChannelParams, ConfigError, RandomStateLaw
from .harness import (SWEEP_AXES, ExperimentConfig, ExperimentResult,
                      run_experiment, save_result_json, sweep, sweep_to_csv)
from .infomath import capacity_poisson, sanov_binomial_exponent

DEFAULTS = {
    "A": 1.0, "lambda": 0.1, "delta": 1e-3, "nu": 0.05, "alpha": 0.1,
    "eps": 0.1, "T": 100.0, "rate_fraction": 0.8,
    "adversary": "uniform_random", "trials": 100, "seed": 20260815,
    "duty": 0.7, "law_mode": "linearized", "m_bits": None, "k_bits": None,
    "max_codeword_bits": 24,
}


def _add_channel_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--A", type=float, help="peak intensity (counts/sec)")
    sp.add_argument("--lambda", dest="lam", type=float,
                    help="dark current (counts/sec)")
    sp.add_argument("--delta", type=float, help="slot width (sec)")


def _add_experiment_flags(sp: argparse.ArgumentParser) -> None:
    _add_channel_flags(sp)
    sp.add_argument("--nu", type=float, help="stuck-slot rate constraint")
    sp.add_argument("--alpha", type=float, help="training overhead fraction")
    sp.add_argument("--eps", type=float, help="threshold margin")
    sp.add_argument("--T", type=float, help="information-phase seconds")
    sp.add_argument("--rate-fraction", dest="rate_fraction", type=float)
    sp.add_argument("--adversary", choices=ADVERSARY_STRATEGIES)
    sp.add_argument("--state-law", dest="state_law",
                    choices=("homogeneous_poisson", "bursty"),
                    help="random state law instead of an adversary")
    sp.add_argument("--state-rate", dest="state_rate", type=float,
                    help="spurious-count intensity (counts/sec)")
    sp.add_argument("--burst-len", dest="burst_len", type=int, default=None)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--duty", type=float, help="codeword ones density")
    sp.add_argument("--m-bits", dest="m_bits", type=int)
    sp.add_argument("--k-bits", dest="k_bits", type=int)
    sp.add_argument("--cap-bits", dest="max_codeword_bits", type=int,
                    help="cap on total codeword bits (max 24)")
    sp.add_argument("--law-mode", dest="law_mode",
                    choices=("linearized", "exact"))
    sp.add_argument("--config", help="JSON file with the same keys; "
                                     "flags override it")


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    file_cfg = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text("utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {args.config}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config file: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")

    def pick(key: str, flag_value):
        if flag_value is not None:
            return flag_value
        return file_cfg.get(key, DEFAULTS.get(key))

    params = ChannelParams(
        A=pick("A", args.A), lam=pick("lambda", args.lam),
        delta=pick("delta", args.delta), nu=pick("nu", args.nu),
        alpha=pick("alpha", args.alpha), eps=pick("eps", args.eps))

    adversary = _pick_adversary(args, file_cfg)
    seed = pick("seed", args.seed)
    env_seed = os.environ.get("POISSON_CSI_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError("POISSON_CSI_SEED must be an integer") from exc

    return ExperimentConfig(
        params=params, T=pick("T", args.T),
        rate_fraction=pick("rate_fraction", args.rate_fraction),
        adversary=adversary, trials=pick("trials", args.trials),
        seed=seed, duty=pick("duty", args.duty),
        law_mode=pick("law_mode", args.law_mode),
        m_bits=pick("m_bits", args.m_bits),
        k_bits=pick("k_bits", args.k_bits),
        max_codeword_bits=pick("max_codeword_bits", args.max_codeword_bits))


def _pick_adversary(args: argparse.Namespace, file_cfg: dict):
    if args.state_law is not None or args.state_rate is not None:
        if args.state_law is None or args.state_rate is None:
            raise ConfigError("--state-law and --state-rate go together")
        return RandomStateLaw(args.state_law, args.state_rate,
                              args.burst_len or 5)
    if args.adversary is not None:
        return args.adversary
    adv = file_cfg.get("adversary", DEFAULTS["adversary"])
    if isinstance(adv, dict):
        return RandomStateLaw(adv["kind"], adv["rate"],
                              adv.get("burst_len", 5))
    return adv


def _fmt_result(res: ExperimentResult) -> str:
    c = res.counts
    return (f"error_rate={res.error_rate:.4f} "
            f"[{res.wilson_low:.4f}, {res.wilson_high:.4f}]  "
            f"ok={c['success']} enc={c['encoder_failure']} miss={c['miss']} "
            f"false={c['false_decode']} train={c['training_failure']}  "
            f"m={res.m_bits} k={res.k_bits}  wall={res.wall_time:.1f}s")


def _cmd_capacity(args: argparse.Namespace) -> int:
    res = capacity_poisson(args.A if args.A is not None else 1.0,
                           args.lam if args.lam is not None else 0.0,
                           units=args.units)
    unit = "bits/sec" if args.units == "bits" else "nats/sec"
    print(f"C = {res.capacity:.5f} {unit}")
    print(f"p* = {res.p_star:.5f}")
    return 0


def _cmd_causal(args: argparse.Namespace) -> int:
    params = ChannelParams(
        A=args.A if args.A is not None else DEFAULTS["A"],
        lam=args.lam if args.lam is not None else DEFAULTS["lambda"],
        delta=args.delta if args.delta is not None else DEFAULTS["delta"])
    with_csi = causal_capacity(params, args.mu)
    without = no_csi_capacity(params, args.mu)
    diff = abs(with_csi.capacity - without.capacity)
    print(f"causal-CSI capacity = {with_csi.capacity:.9f} bits/slot "
          f"(duty {with_csi.p_star:.5f})")
    print(f"no-CSI capacity     = {without.capacity:.9f} bits/slot")
    print(f"difference          = {diff:.3e} bits/slot")
    return 0


def _cmd_sanov(args: argparse.Namespace) -> int:
    res = sanov_binomial_exponent(args.n, args.p, args.q)
    print(f"P[Bin({args.n}, {args.p}) >= ceil(qn)] = {res.exact_tail:.6e}")
    print(f"divergence = {res.rate:.6f} bits/sample")
    print(f"(n+1)*2^(-n*D) = {res.bound:.6e}")
    print(f"bound holds: {res.exact_tail <= res.bound}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    res = run_experiment(cfg, trace_dir=args.dump_tracks)
    print(_fmt_result(res))
    if args.out:
        save_result_json(res, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --values list: {args.values}") from exc
    if not values:
        raise ConfigError("--values must name at least one point")
    points = sweep(cfg, args.axis, values)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, (value, res) in enumerate(points):
        if isinstance(res, ExperimentResult):
            print(f"{args.axis}={value:g}  {_fmt_result(res)}")
            save_result_json(res, out_dir / f"point_{i}.json")
        else:
            print(f"{args.axis}={value:g}  FAILED: {res}")
    sweep_to_csv(args.axis, points, out_dir / "sweep.csv")
    print(f"wrote {out_dir / 'sweep.csv'}")
    if not args.no_figures:
        from .plots import render_sweep_figures

        for path in render_sweep_figures(args.axis, points, out_dir):
            print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poisson-csi",
        description="Peak-limited Poisson channel with transmitter-side "
                    "knowledge of spurious counts: capacities and "
                    "full-block Monte Carlo experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("capacity", help="continuous-time capacity")
    _add_channel_flags(sp)
    sp.add_argument("--units", choices=("bits", "nats"), default="bits")
    sp.set_defaults(func=_cmd_capacity)

    sp = sub.add_parser("simulate", help="one full-block experiment")
    _add_experiment_flags(sp)
    sp.add_argument("--out", help="write the result JSON here")
    sp.add_argument("--dump-tracks", dest="dump_tracks",
                    help="directory for first-trial slot tracks")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("causal", help="causal-CSI vs no-CSI capacity")
    _add_channel_flags(sp)
    sp.add_argument("--mu", type=float, required=True,
                    help="spurious-count intensity (counts/sec)")
    sp.set_defaults(func=_cmd_causal)

    sp = sub.add_parser("sanov", help="binomial tail vs divergence bound")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.set_defaults(func=_cmd_sanov)

    sp = sub.add_parser("sweep", help="experiments along one axis")
    _add_experiment_flags(sp)
    sp.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sp.add_argument("--values", required=True,
                    help="comma-separated axis values")
    sp.add_argument("--out-dir", dest="out_dir", default="sweep_out")
    sp.add_argument("--no-figures", dest="no_figures", action="store_true")
    sp.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Full-block Monte Carlo experiments: training prefix plus information phase.

Each trial is deterministic in (seed, trial index): states, channel noise,
codebook seed and the message all derive from it, so runs reproduce exactly
regardless of execution order.  The decoder is always fed the stuck count
the training decode produced, never the ground truth.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

from . import binning, channel, planning, training
from .channel import ChannelParams, ConfigError, RandomStateLaw, SlotSeq
from .rng import derive, spawn_generator

SCHEMA_VERSION = 1
OUTCOMES = ("success", "encoder_failure", "miss", "false_decode",
            "training_failure")

_Z95 = 1.959963984540054


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    """Wilson score 95% interval for a binomial proportion."""
    if trials <= 0:
        raise ConfigError("trials must be positive")
    z2 = _Z95 * _Z95
    phat = errors / trials
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = (_Z95 / denom) * math.sqrt(
        phat * (1.0 - phat) / trials + z2 / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def code_fingerprint() -> str:
    """Short hash over the package sources, for result provenance."""
    h = hashlib.sha1()
    pkg = Path(__file__).parent
    for path in sorted(pkg.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:12]


@dataclass(frozen=True)
class ExperimentConfig:
    """One full-block Monte Carlo experiment.

    adversary is either one of the named strategies or a RandomStateLaw.
    m_bits/k_bits default to the planner's sizing at rate_fraction.
    """

    params: ChannelParams
    T: float
    rate_fraction: float
    adversary: str | RandomStateLaw
    trials: int
    seed: int
    duty: float = planning.DEFAULT_DUTY
    law_mode: str = "linearized"
    m_bits: int | None = None
    k_bits: int | None = None
    max_codeword_bits: int = 24

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.T <= 0:
            raise ConfigError("T must be positive")
        if not 0 < self.max_codeword_bits <= 24:
            raise ConfigError("max_codeword_bits must lie in 1..24")
        if isinstance(self.adversary, str):
            if self.adversary not in channel.ADVERSARY_STRATEGIES:
                raise ConfigError(f"unknown adversary: {self.adversary}")
        elif not isinstance(self.adversary, RandomStateLaw):
            raise ConfigError("adversary must be a strategy name or a "
                              "RandomStateLaw")
        if (self.m_bits is None) != (self.k_bits is None):
            raise ConfigError("give both m_bits and k_bits or neither")
        if self.m_bits is not None:
            if self.m_bits < 1 or self.k_bits < 0:
                raise ConfigError("need m_bits >= 1 and k_bits >= 0")
            if self.m_bits + self.k_bits > self.max_codeword_bits:
                raise ConfigError("codebook exceeds the codeword cap")

    def describe(self) -> dict:
        adv = self.adversary
        if isinstance(adv, RandomStateLaw):
            adv = {"kind": adv.kind, "rate": adv.rate,
                   "burst_len": adv.burst_len}
        p = self.params
        return {
            "A": p.A, "lambda": p.lam, "delta": p.delta, "nu": p.nu,
            "alpha": p.alpha, "eps": p.eps, "T": self.T,
            "rate_fraction": self.rate_fraction, "adversary": adv,
            "trials": self.trials, "seed": self.seed, "duty": self.duty,
            "law_mode": self.law_mode, "m_bits": self.m_bits,
            "k_bits": self.k_bits,
            "max_codeword_bits": self.max_codeword_bits,
        }


@dataclass(frozen=True)
class ExperimentResult:
    config: dict
    m_bits: int
    k_bits: int
    n: int
    n_train: int
    budget: int
    counts: dict
    trials: int
    error_rate: float
    wilson_low: float
    wilson_high: float
    wall_time: float
    fingerprint: str
    decomposition: dict | None = None
    schema: int = SCHEMA_VERSION

    @property
    def errors(self) -> int:
        return self.trials - self.counts["success"]

    def to_dict(self) -> dict:
        d = {
            "schema": self.schema,
            "config": self.config,
            "design": {"m_bits": self.m_bits, "k_bits": self.k_bits,
                       "n": self.n, "n_train": self.n_train,
                       "budget": self.budget},
            "counts": dict(self.counts),
            "trials": self.trials,
            "error_rate": self.error_rate,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
            "wall_time": self.wall_time,
            "fingerprint": self.fingerprint,
        }
        if self.decomposition is not None:
            d["decomposition"] = self.decomposition
        return d


def _resolve_design(cfg: ExperimentConfig,
                    params: ChannelParams) -> tuple[int, int]:
    if cfg.m_bits is not None:
        return cfg.m_bits, cfg.k_bits
    plan = planning.plan_block(params, cfg.T, cfg.rate_fraction,
                               duty=cfg.duty,
                               cap_bits=cfg.max_codeword_bits,
                               law_mode=cfg.law_mode)
    return plan.m_bits, plan.k_bits


def _run_block(cfg: ExperimentConfig, params: ChannelParams,
               state_source, extra_tally=None,
               trace_dir: str | Path | None = None) -> ExperimentResult:
    """Common trial loop; state_source(trial_seed) -> full-block SlotSeq."""
    m_bits, k_bits = _resolve_design(cfg, params)
    tcfg = training.block_training_config(params, cfg.T)
    n = round(cfg.T / params.delta)
    n_train = tcfg.n_train
    budget = math.floor(params.nu * (1.0 + params.alpha) * cfg.T)
    counts = {name: 0 for name in OUTCOMES}
    t0 = time.perf_counter()
    for trial in range(cfg.trials):
        ts = derive(cfg.seed, trial)
        s_full = state_source(ts, n_train + n)
        if extra_tally is not None:
            extra_tally.observe_states(s_full)
        s_train = SlotSeq(s_full.bits[:n_train], "state")
        s_info = SlotSeq(s_full.bits[n_train:], "state")
        outcome = _run_trial(cfg, params, tcfg, m_bits, k_bits, ts,
                             s_train, s_info,
                             trace_dir if trial == 0 else None)
        counts[outcome] += 1
        if extra_tally is not None:
            extra_tally.observe_outcome(outcome)
    wall = time.perf_counter() - t0
    errors = cfg.trials - counts["success"]
    lo, hi = wilson_interval(errors, cfg.trials)
    return ExperimentResult(
        config=cfg.describe(), m_bits=m_bits, k_bits=k_bits, n=n,
        n_train=n_train, budget=budget, counts=counts, trials=cfg.trials,
        error_rate=errors / cfg.trials, wilson_low=lo, wilson_high=hi,
        wall_time=wall, fingerprint=code_fingerprint(),
        decomposition=extra_tally.summary() if extra_tally else None)


def _run_trial(cfg: ExperimentConfig, params: ChannelParams,
               tcfg: training.TrainingConfig, m_bits: int, k_bits: int,
               ts: int, s_train: SlotSeq, s_info: SlotSeq,
               trace_dir: str | Path | None = None) -> str:
    v = s_info.popcount()
    if v > tcfg.max_value:
        # the prefix cannot convey this count; give the trial away
        return "training_failure"
    x_train = training.train_encode(v, tcfg)
    y_train = channel.simulate_slots(x_train, s_train, params,
                                     derive(ts, 1), cfg.law_mode)
    v_hat = training.train_decode(y_train, tcfg, params)
    if v_hat is None:
        return "training_failure"
    spec = binning.CodebookSpec(p=cfg.duty, n=s_info.n, m_bits=m_bits,
                                k_bits=k_bits, seed=derive(ts, 2))
    m_true = int(spawn_generator(ts, 3).integers(spec.num_messages))
    enc = binning.encode(m_true, s_info, spec, params)
    if enc.failed:
        return "encoder_failure"
    y = channel.simulate_slots(enc.x, s_info, params, derive(ts, 4),
                               cfg.law_mode)
    if trace_dir is not None:
        _dump_traces(trace_dir, x_train=x_train, s_train=s_train,
                     y_train=y_train, x_info=enc.x, s_info=s_info,
                     y_info=y)
    dec = binning.decode(y, v_hat, spec, params)
    if dec.m_hat == m_true:
        return "success"
    if dec.distinct_qualifiers >= 2:
        return "false_decode"
    if dec.m_hat is None:
        return "miss"
    return "false_decode"


def _dump_traces(trace_dir: str | Path, **tracks: SlotSeq) -> None:
    out = Path(trace_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, seq in tracks.items():
        (out / f"{name}.txt").write_text(seq.to_text(), encoding="utf-8")
        (out / f"{name}.rle").write_bytes(seq.to_rle())


def run_adversarial_experiment(cfg: ExperimentConfig,
                               trace_dir: str | Path | None = None
                               ) -> ExperimentResult:
    """Monte Carlo against one named adversary strategy at full budget."""
    if not isinstance(cfg.adversary, str):
        raise ConfigError("run_adversarial_experiment needs a strategy name")
    params = cfg.params
    tcfg = training.block_training_config(params, cfg.T)
    budget = channel.StateBudget(params.nu, (1.0 + params.alpha) * cfg.T)

    def states(ts: int, n_total: int) -> SlotSeq:
        return channel.gen_adversarial_states(
            n_total, budget, cfg.adversary, derive(ts, 0),
            info_start=tcfg.n_train)

    return _run_block(cfg, params, states, trace_dir=trace_dir)


class _DecompositionTally:
    """Split of outcomes by whether the block's stuck count hit the cap."""

    def __init__(self, threshold: int, poisson_mean: float) -> None:
        self.threshold = threshold
        self.poisson_mean = poisson_mean
        self.big = 0
        self.small = 0
        self.errors_big = 0
        self.errors_small = 0
        self._last_big = False

    def observe_states(self, s_full: SlotSeq) -> None:
        self._last_big = s_full.popcount() >= self.threshold
        if self._last_big:
            self.big += 1
        else:
            self.small += 1

    def observe_outcome(self, outcome: str) -> None:
        if outcome != "success":
            if self._last_big:
                self.errors_big += 1
            else:
                self.errors_small += 1

    def summary(self) -> dict:
        from scipy.stats import poisson

        trials = self.big + self.small
        return {
            "threshold": self.threshold,
            "big_state_trials": self.big,
            "errors_with_big_state": self.errors_big,
            "errors_with_small_state": self.errors_small,
            "empirical_tail": self.big / trials,
            "conditional_error":
                self.errors_small / self.small if self.small else 0.0,
            "poisson_tail": float(poisson.sf(self.threshold - 1,
                                             self.poisson_mean)),
        }


def run_random_state_experiment(cfg: ExperimentConfig,
                                trace_dir: str | Path | None = None
                                ) -> ExperimentResult:
    """Monte Carlo with stochastic states and the tail/conditional split.

    The code is sized for the budget 2*rate*T/eps: the state constraint nu
    is rederived from the law's rate so that floor(nu*(1+alpha)*T) equals
    floor(2*rate*T/eps), and trials whose realized stuck count reaches that
    cap are tallied separately.
    """
    if not isinstance(cfg.adversary, RandomStateLaw):
        raise ConfigError("run_random_state_experiment needs a "
                          "RandomStateLaw")
    law = cfg.adversary
    params = cfg.params
    if law.rate > 0:
        nu_eff = 2.0 * law.rate / (params.eps * (1.0 + params.alpha))
        params = replace(params, nu=nu_eff)
    threshold = math.floor(params.nu * (1.0 + params.alpha) * cfg.T)
    tally = None
    if threshold > 0:
        mean = law.mean_rate() * (1.0 + params.alpha) * cfg.T
        tally = _DecompositionTally(threshold, mean)

    def states(ts: int, n_total: int) -> SlotSeq:
        return channel.gen_random_states(n_total, law, params, derive(ts, 0))

    return _run_block(cfg, params, states, extra_tally=tally,
                      trace_dir=trace_dir)


def run_experiment(cfg: ExperimentConfig,
                   trace_dir: str | Path | None = None) -> ExperimentResult:
    if isinstance(cfg.adversary, RandomStateLaw):
        return run_random_state_experiment(cfg, trace_dir)
    return run_adversarial_experiment(cfg, trace_dir)


SWEEP_AXES = ("T", "rate_fraction", "nu", "delta")


def sweep(cfg_base: ExperimentConfig, axis: str,
          values: list[float]) -> list:
    """Independent experiments along one axis; failures don't stop it."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    out = []
    for i, value in enumerate(values):
        seed_i = derive(cfg_base.seed, 0x5E, i)
        if axis in ("nu", "delta"):
            params_i = replace(cfg_base.params, **{
                "nu" if axis == "nu" else "delta": value})
            cfg_i = replace(cfg_base, params=params_i, seed=seed_i)
        else:
            cfg_i = replace(cfg_base, **{axis: value}, seed=seed_i)
        try:
            out.append((value, run_experiment(cfg_i)))
        except Exception as exc:  # noqa: BLE001 - per-point errors recorded
            out.append((value, exc))
    return out


def save_result_json(result: ExperimentResult, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")


SWEEP_CSV_FIELDS = [
    "axis", "value", "status", "trials", "success", "encoder_failure",
    "miss", "false_decode", "training_failure", "error_rate", "wilson_low",
    "wilson_high", "m_bits", "k_bits", "n", "n_train", "budget",
    "wall_time", "error",
]


def sweep_to_csv(axis: str, points: list, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_CSV_FIELDS)
        writer.writeheader()
        for value, res in points:
            row = {"axis": axis, "value": value}
            if isinstance(res, ExperimentResult):
                row.update(status="ok", trials=res.trials,
                           error_rate=res.error_rate,
                           wilson_low=res.wilson_low,
                           wilson_high=res.wilson_high,
                           m_bits=res.m_bits, k_bits=res.k_bits, n=res.n,
                           n_train=res.n_train, budget=res.budget,
                           wall_time=round(res.wall_time, 3), error="")
                row.update(res.counts)
            else:
                row.update(status="failed", error=str(res))
            writer.writerow(row)

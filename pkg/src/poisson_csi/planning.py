"""Finite-block design from exact binomial tails.

Asymptotic rate formulas are useless at desk scale, so block designs are
sized against exactly computed outcome probabilities instead: the bin count
covers the worst-case stuck budget, and the message count is a fraction of
the zero-state false-overlap exponent less bin and safety overhead.  The
same tail machinery predicts per-adversary error rates, which Monte Carlo
runs should reproduce within sampling noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .channel import ChannelParams, ConfigError
from .training import optimal_group_threshold

ENC_FAIL_TARGET = 5e-3
OVERHEAD_BITS = 3.0
DEFAULT_DUTY = 0.7


@dataclass(frozen=True)
class BlockPlan:
    """Sizes and rates of one full block (training prefix + info phase)."""

    T: float
    duty: float
    n: int
    n_train: int
    budget: int
    m_bits: int
    k_bits: int
    k_need: int
    exponent_bits: float  # zero-state false-overlap exponent, bits
    base_bits: float      # exponent less bin + safety overhead

    @property
    def num_codewords(self) -> int:
        return 1 << (self.m_bits + self.k_bits)


def _context(params: ChannelParams, T: float, duty: float,
             law_mode: str) -> dict:
    p0, p1 = params.slot_law(law_mode)
    pa = duty * params.A + params.lam
    qs = duty * (params.A + params.lam) / pa
    return {
        "p": duty,
        "T": T,
        "n": round(T / params.delta),
        "n_train": round(params.alpha * T / params.delta),
        "budget": math.floor(params.nu * (1.0 + params.alpha) * T),
        "pa": pa,
        "qt": (1.0 - params.eps) * qs,
        "p0": p0,
        "p1": p1,
        "pm": duty * p1 + (1.0 - duty) * p0,
    }


def _theta_d(ctx: dict, vhat: int) -> int:
    return math.ceil(ctx["qt"] * (ctx["pa"] * ctx["T"] + vhat))


def _enc_stats(ctx: dict, v: int) -> tuple[int, float]:
    """Encoder threshold and single-bin success probability at v stuck."""
    th_e = math.ceil(ctx["qt"] * v)
    t_e = float(binom.sf(th_e - 1, v, ctx["p"])) if v > 0 else 1.0
    return th_e, t_e


def _k_need(ctx: dict, target: float) -> int:
    """Smallest k_bits with encoder-failure probability <= target."""
    _, t_e = _enc_stats(ctx, ctx["budget"])
    if t_e <= 0.0:
        return 48
    k = 0
    goal = math.log(1.0 / target)
    while (1 << k) * (-math.log1p(-min(t_e, 1.0 - 1e-15))) < goal:
        k += 1
        if k >= 48:
            break
    return k


def _miss_prob(ctx: dict, v: int, th: int) -> float:
    """P[true-codeword overlap < th], conditioned on encoder success."""
    n, p, p1 = ctx["n"], ctx["p"], ctx["p1"]
    if v == 0:
        return float(binom.cdf(th - 1, n, p * p1))
    th_e, _ = _enc_stats(ctx, v)
    bv = np.arange(th_e, v + 1)
    w = binom.pmf(bv, v, p)
    w = w / w.sum()
    return float(np.sum(w * binom.cdf(th - 1 - bv, n - v, p * p1)))


def _t_false(ctx: dict, v: int, th: int) -> float:
    """P[one non-transmitted codeword reaches overlap th]."""
    n, p, pm = ctx["n"], ctx["p"], ctx["pm"]
    if v == 0:
        return float(binom.sf(th - 1, n, p * pm))
    bv = np.arange(0, v + 1)
    w = binom.pmf(bv, v, p)
    return float(np.sum(w * binom.sf(th - 1 - bv, n - v, p * pm)))


def _train_stats(ctx: dict, params: ChannelParams) -> tuple[int, int, int, float, float]:
    budget = ctx["budget"]
    bits = max(1, budget.bit_length())
    reps = ctx["n_train"] // bits
    if reps < 1:
        raise ConfigError("training prefix shorter than one slot per bit")
    p0_lin, p1_lin = params.slot_law("linearized")
    thr = optimal_group_threshold(reps, p0_lin, p1_lin)
    e0 = float(binom.sf(thr - 1, reps, ctx["p0"]))
    e1 = float(binom.cdf(thr - 1, reps, ctx["p1"]))
    return bits, reps, thr, e0, e1


def _vhat_dist(v: int, bits: int, e0: float, e1: float) -> list[tuple[int, float]]:
    """Decoded-count distribution under independent per-group flips."""
    out = []
    for pat in range(1 << bits):
        pr, vhat = 1.0, 0
        for i in range(bits):
            b = (v >> i) & 1
            flip = (pat >> i) & 1
            if b:
                pr *= e1 if flip else 1.0 - e1
                nb = 0 if flip else 1
            else:
                pr *= e0 if flip else 1.0 - e0
                nb = 1 if flip else 0
            vhat |= nb << i
        if pr > 1e-12:
            out.append((vhat, pr))
    return out


def _error_given_v(ctx: dict, m_bits: int, k_bits: int, v: int,
                   vhat_dist: list[tuple[int, float]]) -> tuple[float, float]:
    """Error probability at realized stuck count v; returns (err, enc_fail)."""
    _, t_e = _enc_stats(ctx, v)
    if t_e >= 1.0:
        enc_f = 0.0
    else:
        enc_f = math.exp((1 << k_bits) * math.log1p(-t_e))
    n_false = ((1 << m_bits) - 1) * (1 << k_bits)
    tot = 0.0
    for vhat, pr in vhat_dist:
        th = _theta_d(ctx, vhat)
        miss = _miss_prob(ctx, v, th)
        tf = _t_false(ctx, v, th)
        if tf >= 1.0:
            pfalse = 1.0
        else:
            pfalse = -math.expm1(n_false * math.log1p(-tf))
        tot += pr * (1.0 - (1.0 - miss) * (1.0 - pfalse))
    return enc_f + (1.0 - enc_f) * tot, enc_f


def plan_block(params: ChannelParams, T: float, rate_fraction: float,
               duty: float = DEFAULT_DUTY, cap_bits: int = 24,
               law_mode: str = "linearized",
               enc_fail_target: float = ENC_FAIL_TARGET,
               overhead_bits: float = OVERHEAD_BITS) -> BlockPlan:
    """Size (m_bits, k_bits) for a block at a fraction of the base rate.

    The base message budget is the zero-state false-overlap exponent minus
    the bins needed to cover the stuck budget minus a safety overhead; the
    message count is rate_fraction times that, and bins are clamped so the
    codebook stays within 2**cap_bits codewords.
    """
    if rate_fraction <= 0:
        raise ConfigError("rate_fraction must be positive")
    if not 0.0 < duty < 1.0:
        raise ConfigError("duty must lie in (0, 1)")
    ctx = _context(params, T, duty, law_mode)
    kn = _k_need(ctx, enc_fail_target)
    exp0 = -math.log2(max(_t_false(ctx, 0, _theta_d(ctx, 1)), 1e-300))
    base = exp0 - kn - overhead_bits
    m = max(1, math.floor(rate_fraction * base))
    m = min(m, cap_bits)
    k = min(kn, max(0, cap_bits - m))
    return BlockPlan(T=T, duty=duty, n=ctx["n"], n_train=ctx["n_train"],
                     budget=ctx["budget"], m_bits=m, k_bits=k, k_need=kn,
                     exponent_bits=exp0, base_bits=base)


def predict_adversary_error(params: ChannelParams, T: float, duty: float,
                            m_bits: int, k_bits: int, strategy: str,
                            law_mode: str = "linearized") -> float:
    """Exact-tail error prediction for one adversary strategy.

    info_phase_targeted, front_loaded and uniform_random are modeled
    exactly (up to the independent-false-codeword union); bursty uses a
    coarse per-group flip model and should be read as indicative only.
    """
    ctx = _context(params, T, duty, law_mode)
    budget = ctx["budget"]
    bits, reps, thr, e0, e1 = _train_stats(ctx, params)
    if strategy == "info_phase_targeted":
        vd = _vhat_dist(budget, bits, e0, e1)
        err, _ = _error_given_v(ctx, m_bits, k_bits, budget, vd)
        return err
    if strategy == "front_loaded":
        # whole budget lands in the first bit group: its bit reads 1
        vd = [(vh | 1, pr) for vh, pr in _vhat_dist(0, bits, e0, e1)]
        err, _ = _error_given_v(ctx, m_bits, k_bits, 0, vd)
        return err
    if strategy == "uniform_random":
        frac_info = 1.0 / (1.0 + params.alpha)
        vs = np.arange(budget + 1)
        wv = binom.pmf(vs, budget, frac_info)
        tot, mass = 0.0, 0.0
        for v, pv in zip(vs, wv):
            if pv < 1e-6:
                continue
            vd = _vhat_dist(int(v), bits, e0, e1)
            err, _ = _error_given_v(ctx, m_bits, k_bits, int(v), vd)
            tot += pv * err
            mass += pv
        return tot / mass
    if strategy == "bursty":
        burst = 5
        n_total = ctx["n"] + ctx["n_train"]
        n_bursts = -(-budget // burst)
        p_group = reps / n_total
        flip = float(binom.sf(thr - burst - 1, reps - burst, ctx["p0"]))
        f_b = (1.0 - (1.0 - p_group) ** n_bursts) * flip
        v_mean = min(budget, burst * n_bursts * ctx["n"] / n_total)
        v = int(round(v_mean))
        vd = _vhat_dist(v, bits, max(e0, f_b), e1)
        err, _ = _error_given_v(ctx, m_bits, k_bits, v, vd)
        return err
    raise ConfigError(f"unknown adversary strategy: {strategy}")

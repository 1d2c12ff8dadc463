"""Training phase: convey the stuck-slot count as repeated binary groups.

The count muT is written in binary, least significant bit first; bit b owns
the contiguous group of `reps` slots starting at b*reps, driven at full
intensity when the bit is 1 and silent when 0.  The decoder thresholds each
group's ones-count.  Stuck slots can only push counts up, so an adversary
can flip groups 0 -> 1 but never 1 -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .channel import ChannelParams, ConfigError, SlotSeq


@dataclass(frozen=True)
class TrainingConfig:
    """Layout and decision rule of the training phase.

    calibration scales the nominal threshold reps*(p0+p1)/2; None picks the
    integer threshold minimizing the two binomial flip probabilities.
    guard is a symmetric dead band around the threshold: a group count
    landing strictly inside it makes the decode report FAILURE.
    """

    n_train: int
    max_value: int
    reps: int
    guard: float = 0.0
    calibration: float | None = None

    def __post_init__(self) -> None:
        if self.n_train < 1 or self.reps < 1 or self.max_value < 0:
            raise ConfigError("need n_train >= 1, reps >= 1, max_value >= 0")
        if self.guard < 0:
            raise ConfigError("guard must be nonnegative")
        if self.n_train < self.reps * self.num_bits:
            raise ConfigError("n_train too short for the bit groups")

    @property
    def num_bits(self) -> int:
        return max(1, self.max_value.bit_length())


def block_training_config(params: ChannelParams, T: float,
                          guard: float = 0.0) -> TrainingConfig:
    """Config for the alpha*T-second prefix of a T-second block.

    Spends the whole prefix: reps = n_train // num_bits.
    """
    n_train = round(params.alpha * T / params.delta)
    max_value = math.floor(params.nu * (1.0 + params.alpha) * T)
    bits = max(1, max_value.bit_length())
    reps = n_train // bits
    if reps < 1:
        raise ConfigError("training prefix shorter than one slot per bit")
    return TrainingConfig(n_train, max_value, reps, guard)


def train_encode(muT: int, cfg: TrainingConfig) -> SlotSeq:
    """Input track for the training phase; LSB group first."""
    if not 0 <= muT <= cfg.max_value:
        raise ConfigError("muT out of range for this training config")
    bits = np.zeros(cfg.n_train, dtype=np.uint8)
    for b in range(cfg.num_bits):
        if (muT >> b) & 1:
            bits[b * cfg.reps:(b + 1) * cfg.reps] = 1
    return SlotSeq(bits, "input")


def _group_threshold(cfg: TrainingConfig, params: ChannelParams) -> float:
    p0, p1 = params.slot_law("linearized")
    if cfg.calibration is not None:
        return cfg.reps * (p0 + p1) / 2.0 * cfg.calibration
    return float(optimal_group_threshold(cfg.reps, p0, p1))


def optimal_group_threshold(reps: int, p0: float, p1: float) -> int:
    """Integer count minimizing P[flip 0->1] + P[flip 1->0]."""
    t = np.arange(1, reps + 1)
    e0 = binom.sf(t - 1, reps, p0)   # silent group read as active
    e1 = binom.cdf(t - 1, reps, p1)  # active group read as silent
    return int(t[np.argmin(e0 + e1)])


def train_decode(y: SlotSeq, cfg: TrainingConfig,
                 params: ChannelParams) -> int | None:
    """Assembled count, or None (FAILURE) on a guard-band hit."""
    if y.n != cfg.n_train:
        raise ConfigError("received track length does not match the config")
    thr = _group_threshold(cfg, params)
    value = 0
    for b in range(cfg.num_bits):
        count = int(y.bits[b * cfg.reps:(b + 1) * cfg.reps].sum())
        if cfg.guard > 0 and abs(count - thr) < cfg.guard:
            return None
        if count >= thr:
            value |= 1 << b
    return value


def auto_reps(params: ChannelParams, budget: int,
              target: float = 1e-3) -> int:
    """Smallest reps whose worst-case flip probability meets target.

    Sizes against both channel noise and an adversary dumping its whole
    budget into one silent group, at the threshold train_decode will use.
    """
    if budget < 0:
        raise ConfigError("budget must be nonnegative")
    bits = max(1, budget.bit_length())
    p0, p1 = params.slot_law("linearized")

    def failure(reps: int) -> float:
        t = optimal_group_threshold(reps, p0, p1)
        if reps <= budget or t <= budget:
            return 1.0
        e0_adv = binom.sf(t - budget - 1, reps - budget, p0)
        e1 = binom.cdf(t - 1, reps, p1)
        return bits * (e0_adv + e1)

    lo, hi = 1, 1
    while failure(hi) > target:
        hi *= 2
        if hi > 10**7:
            raise ConfigError("no feasible reps below 1e7 slots per bit")
    while lo < hi:
        mid = (lo + hi) // 2
        if failure(mid) <= target:
            hi = mid
        else:
            lo = mid + 1
    return hi

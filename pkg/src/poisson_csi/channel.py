"""Slot-level channel model: dark current, peak-limited input, stuck slots.

A block of duration (1+alpha)*T seconds is discretized into slots of width
delta.  Each slot carries input intensity 0 or A; the receiver reports 1 if at
least one count arrived.  A "stuck" slot (state bit 1) contains a spurious
count and therefore always reads 1.  Two slot laws are supported: the
linearized probabilities lambda*delta and (A+lambda)*delta, valid when both
are < 0.1, and the exact mode 1-exp(-intensity*delta).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .rng import spawn_generator

TRACKS = ("input", "state", "output")


class ConfigError(ValueError):
    """Invalid parameter combination supplied by a caller or a config file."""


@dataclass(frozen=True)
class ChannelParams:
    """Physical and protocol parameters shared across a whole experiment.

    A is the peak input intensity (counts/sec), lam the dark-current rate,
    delta the slot width in seconds.  nu bounds the adversary's spurious-count
    rate; alpha is the training-phase overhead fraction; eps the threshold
    slack used by both codec phases.
    """

    A: float
    lam: float
    delta: float
    nu: float = 0.05
    alpha: float = 0.1
    eps: float = 0.1

    def __post_init__(self) -> None:
        if self.A <= 0 or self.lam < 0 or self.delta <= 0:
            raise ConfigError("require A > 0, lam >= 0, delta > 0")
        if (self.A + self.lam) * self.delta > 1.0:
            raise ConfigError("slot law needs (A+lam)*delta <= 1")
        if not (0 <= self.nu and 0 < self.alpha and 0 < self.eps < 1):
            raise ConfigError("require nu >= 0, alpha > 0, 0 < eps < 1")

    def slot_law(self, mode: str = "linearized") -> tuple[float, float]:
        """(P[y=1 | x=0, clean], P[y=1 | x=1, clean]) for the given mode."""
        if mode == "linearized":
            return self.lam * self.delta, (self.A + self.lam) * self.delta
        if mode == "exact":
            return (-np.expm1(-self.lam * self.delta),
                    -np.expm1(-(self.A + self.lam) * self.delta))
        raise ConfigError(f"unknown law mode {mode!r}")


@dataclass(frozen=True)
class StateBudget:
    """Adversary allowance: at most max_stuck stuck slots over the block."""

    nu: float
    block_seconds: float
    max_stuck: int = field(init=False)

    def __post_init__(self) -> None:
        if self.nu < 0 or self.block_seconds <= 0:
            raise ConfigError("require nu >= 0 and block_seconds > 0")
        object.__setattr__(self, "max_stuck",
                           int(np.floor(self.nu * self.block_seconds)))


@dataclass(frozen=True)
class RandomStateLaw:
    """Stochastic (non-adversarial) state process over slots.

    kind 'homogeneous_poisson': slot indicators are i.i.d. with
    P[1] = 1 - exp(-rate*delta).  kind 'bursty': Poisson burst starts, each
    burst sticking burst_len consecutive slots, with the same mean slot rate.
    kind 'none': no states.
    """

    kind: str = "none"
    rate: float = 0.0
    burst_len: int = 5

    def __post_init__(self) -> None:
        if self.kind not in ("none", "homogeneous_poisson", "bursty"):
            raise ConfigError(f"unknown state law {self.kind!r}")
        if self.rate < 0 or self.burst_len < 1:
            raise ConfigError("require rate >= 0 and burst_len >= 1")

    def mean_rate(self) -> float:
        """zeta: mean stuck-slot count per second."""
        return self.rate


class SlotSeq:
    """A binary track over n slots: channel input, state, or output."""

    __slots__ = ("bits", "track")

    def __init__(self, bits: np.ndarray, track: str):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size == 0:
            raise ConfigError("SlotSeq needs a nonempty 1-d bit array")
        if track not in TRACKS:
            raise ConfigError(f"track must be one of {TRACKS}")
        if bits.max(initial=0) > 1:
            raise ConfigError("bits must be 0/1")
        self.bits = bits
        self.track = track

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def popcount(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __eq__(self, other) -> bool:
        return (isinstance(other, SlotSeq) and self.track == other.track
                and np.array_equal(self.bits, other.bits))

    def __repr__(self) -> str:
        return f"SlotSeq(n={self.n}, track={self.track!r}, ones={self.popcount()})"

    @classmethod
    def zeros(cls, n: int, track: str) -> "SlotSeq":
        return cls(np.zeros(n, dtype=np.uint8), track)

    # --- serialization -------------------------------------------------
    # Text: one header line "slotseq n=<n> track=<track>", then 0/1 lines
    # wrapped at 120 characters.  Binary: magic SLSQ, version, track byte,
    # uint64 length, first bit, uint32 run lengths, all little-endian.

    def to_text(self) -> str:
        body = "".join("1" if b else "0" for b in self.bits)
        lines = [body[i:i + 120] for i in range(0, len(body), 120)]
        return f"slotseq n={self.n} track={self.track}\n" + "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SlotSeq":
        lines = text.strip().split("\n")
        head = lines[0].split()
        if len(head) != 3 or head[0] != "slotseq":
            raise ConfigError("bad slotseq text header")
        n = int(head[1].removeprefix("n="))
        track = head[2].removeprefix("track=")
        body = "".join(lines[1:])
        if len(body) != n or set(body) - {"0", "1"}:
            raise ConfigError("slotseq text body does not match header")
        return cls(np.frombuffer(body.encode(), dtype=np.uint8) - ord("0"), track)

    def to_rle(self) -> bytes:
        bits = self.bits
        # run boundaries via change points
        change = np.flatnonzero(np.diff(bits.astype(np.int8))) + 1
        bounds = np.concatenate(([0], change, [bits.size]))
        runs = np.diff(bounds).astype(np.uint32)
        head = struct.pack("<4sBBQB", b"SLSQ", 1, TRACKS.index(self.track),
                           bits.size, int(bits[0]))
        return head + runs.astype("<u4").tobytes()

    @classmethod
    def from_rle(cls, blob: bytes) -> "SlotSeq":
        if len(blob) < 15 or blob[:4] != b"SLSQ":
            raise ConfigError("bad slotseq binary magic")
        _, version, track_i, n, first = struct.unpack("<4sBBQB", blob[:15])
        if version != 1 or track_i >= len(TRACKS):
            raise ConfigError("unsupported slotseq binary header")
        runs = np.frombuffer(blob[15:], dtype="<u4").astype(np.int64)
        if runs.sum() != n:
            raise ConfigError("slotseq run lengths do not sum to n")
        vals = (np.arange(runs.size) + first) % 2
        return cls(np.repeat(vals.astype(np.uint8), runs), TRACKS[track_i])


def simulate_slots(x: SlotSeq, s: SlotSeq, params: ChannelParams, seed: int,
                   law_mode: str = "linearized") -> SlotSeq:
    """Push an input track through the slotted channel with state track s.

    Stuck slots always output 1; clean slots output 1 with the slot-law
    probability of the input bit.  Deterministic given the seed.
    """
    if x.n != s.n:
        raise ConfigError("input and state tracks differ in length")
    p0, p1 = params.slot_law(law_mode)
    if law_mode == "linearized" and p1 >= 0.1:
        raise ConfigError("linearized law needs (A+lam)*delta < 0.1")
    rng = spawn_generator(seed)
    u = rng.random(x.n)
    prob = np.where(x.bits == 1, p1, p0)
    y = (u < prob) | (s.bits == 1)
    return SlotSeq(y.astype(np.uint8), "output")


def gen_adversarial_states(n: int, budget: StateBudget, strategy: str,
                           seed: int, info_start: int = 0,
                           burst_len: int = 5) -> SlotSeq:
    """A state track chosen by one of the four canonical adversaries.

    info_start is the slot index where the information phase begins
    (slots [0, info_start) are the training phase).
    """
    k = min(budget.max_stuck, n)
    bits = np.zeros(n, dtype=np.uint8)
    if k == 0:
        return SlotSeq(bits, "state")
    rng = spawn_generator(seed, 0xAD)
    if strategy == "front_loaded":
        bits[:k] = 1
    elif strategy == "uniform_random":
        bits[rng.choice(n, size=k, replace=False)] = 1
    elif strategy == "info_phase_targeted":
        span = n - info_start
        if span <= 0:
            raise ConfigError("info_phase_targeted needs info_start < n")
        kk = min(k, span)
        bits[info_start + rng.choice(span, size=kk, replace=False)] = 1
    elif strategy == "bursty":
        placed = 0
        while placed < k:
            start = int(rng.integers(0, n))
            run = min(burst_len, k - placed, n - start)
            seg = bits[start:start + run]
            placed += int(run - seg.sum())
            seg[:] = 1
    else:
        raise ConfigError(f"unknown adversary strategy {strategy!r}")
    return SlotSeq(bits, "state")


ADVERSARY_STRATEGIES = ("uniform_random", "front_loaded", "bursty",
                        "info_phase_targeted")


def gen_random_states(n: int, law: RandomStateLaw, params: ChannelParams,
                      seed: int) -> SlotSeq:
    """Sample a random (non-adversarial) state track from the given law."""
    bits = np.zeros(n, dtype=np.uint8)
    if law.kind == "none" or law.rate == 0:
        return SlotSeq(bits, "state")
    rng = spawn_generator(seed, 0x5A)
    if law.kind == "homogeneous_poisson":
        p_stick = -np.expm1(-law.rate * params.delta)
        bits = (rng.random(n) < p_stick).astype(np.uint8)
    elif law.kind == "bursty":
        # burst starts form a thinned Poisson stream with the same mean
        # slot rate: rate/burst_len starts per second
        p_start = -np.expm1(-law.rate * params.delta / law.burst_len)
        starts = np.flatnonzero(rng.random(n) < p_start)
        for st in starts:
            bits[st:st + law.burst_len] = 1
    return SlotSeq(bits, "state")

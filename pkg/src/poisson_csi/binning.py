"""Random binning codec: lazy codebook, threshold encoder, exhaustive decoder.

The codebook is never materialized: bit j of codeword (m, k) is a pure
function of (seed, m, k, j) through a 64-bit hash chain, marginally Ber(p).
The encoder picks the first bin whose codeword lands enough ones on the
stuck slots; the decoder scans every (m', k') and accepts a unique message
whose overlap with the received track meets the decoder threshold.

The scan is the hot path.  A numba kernel walks contiguous message chunks
(the pure-numpy fallback is bit-identical); between chunks the scan exits
early once two distinct messages qualify, which already determines the
erasure outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, ConfigError, SlotSeq
from .rng import GOLDEN, MASK64, bernoulli_threshold, derive, mix64, mix64_array, position_keys

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


@dataclass(frozen=True)
class CodebookSpec:
    """Addressing and statistics of one random codebook."""

    p: float
    n: int
    m_bits: int
    k_bits: int
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("ones density p must lie in [0, 1]")
        if self.n < 1 or self.m_bits < 0 or self.k_bits < 0:
            raise ConfigError("need n >= 1, m_bits >= 0, k_bits >= 0")
        if self.m_bits + self.k_bits > 48:
            raise ConfigError("codebook address space too large")

    @property
    def num_messages(self) -> int:
        return 1 << self.m_bits

    @property
    def num_bins(self) -> int:
        return 1 << self.k_bits


@dataclass(frozen=True)
class EncodeOutcome:
    x: SlotSeq
    k: int | None  # None = FAILURE: no bin covered the stuck pattern

    @property
    def failed(self) -> bool:
        return self.k is None


@dataclass(frozen=True)
class DecodeOutcome:
    m_hat: int | None  # None = ERASURE
    k_hat: int | None
    distinct_qualifiers: int  # 0, 1, or 2 (2 means "at least two")

    @property
    def erased(self) -> bool:
        return self.m_hat is None


def overlap(a: SlotSeq, b: SlotSeq) -> int:
    """Number of positions where both tracks are 1."""
    if a.n != b.n:
        raise ConfigError("overlap needs equal-length tracks")
    return int(np.count_nonzero(a.bits & b.bits))


def encoder_threshold(muT: int, p: float, A: float, lam: float,
                      eps: float) -> int:
    """Minimum ones the chosen codeword must land on the stuck slots."""
    if muT < 0:
        raise ConfigError("muT must be nonnegative")
    qs = p * (A + lam) / (p * A + lam)
    return math.ceil((1.0 - eps) * qs * muT)


def decoder_threshold(muT: int, n: int, p: float, A: float, lam: float,
                      delta: float, eps: float) -> int:
    """Minimum overlap with the received track for a codeword to qualify."""
    if muT < 0:
        raise ConfigError("muT must be nonnegative")
    T = n * delta
    qs = p * (A + lam) / (p * A + lam)
    return math.ceil((1.0 - eps) * qs * ((p * A + lam) * T + muT))


# --- lazy codebook ------------------------------------------------------

def _mk_hash(spec: CodebookSpec, m: int, k: int) -> int:
    return derive(spec.seed, m, k)


def codeword_bit(spec: CodebookSpec, m: int, k: int, j: int) -> int:
    """Bit j of codeword (m, k); pure in (seed, m, k, j)."""
    if not (0 <= m < spec.num_messages and 0 <= k < spec.num_bins
            and 0 <= j < spec.n):
        raise IndexError("codeword index out of range")
    h = mix64(_mk_hash(spec, m, k) ^ ((j + GOLDEN) & MASK64))
    return 1 if h < bernoulli_threshold(spec.p) else 0


def codeword_bits_at(spec: CodebookSpec, m: int, k: int,
                     positions: np.ndarray) -> np.ndarray:
    """Codeword bits at the given slot positions, vectorized."""
    thr = bernoulli_threshold(spec.p)
    if thr >= (1 << 64):
        return np.ones(positions.size, dtype=np.uint8)
    if thr <= 0:
        return np.zeros(positions.size, dtype=np.uint8)
    keys = position_keys(np.asarray(positions, dtype=np.uint64))
    h = np.uint64(_mk_hash(spec, m, k))
    return (mix64_array(h ^ keys) < np.uint64(thr)).astype(np.uint8)


def codeword_slots(spec: CodebookSpec, m: int, k: int) -> SlotSeq:
    """Full input track of codeword (m, k)."""
    return SlotSeq(codeword_bits_at(spec, m, k, np.arange(spec.n)), "input")


# --- encoder --------------------------------------------------------------

def encode(m: int, s: SlotSeq, spec: CodebookSpec, params: ChannelParams,
           eps: float | None = None) -> EncodeOutcome:
    """First bin whose codeword covers the stuck slots; FAILURE otherwise."""
    if s.n != spec.n:
        raise ConfigError("state track length does not match the codebook")
    if not 0 <= m < spec.num_messages:
        raise ConfigError("message index out of range")
    eps = params.eps if eps is None else eps
    stuck = np.flatnonzero(s.bits).astype(np.uint64)
    theta = encoder_threshold(stuck.size, spec.p, params.A, params.lam, eps)
    if theta == 0:
        return EncodeOutcome(codeword_slots(spec, m, 0), 0)
    thr = bernoulli_threshold(spec.p)
    keys = position_keys(stuck)
    # scan bins in blocks; expected hit after ~1/t_e bins
    block = 512
    for k0 in range(0, spec.num_bins, block):
        ks = np.arange(k0, min(k0 + block, spec.num_bins), dtype=np.uint64)
        h1 = np.uint64(derive(spec.seed, m))
        h2 = mix64_array(h1 ^ (ks + np.uint64(GOLDEN)))
        if thr >= (1 << 64):
            counts = np.full(ks.size, keys.size)
        else:
            bits = mix64_array(h2[:, None] ^ keys[None, :]) < np.uint64(thr)
            counts = bits.sum(axis=1)
        hit = np.flatnonzero(counts >= theta)
        if hit.size:
            k = int(ks[hit[0]])
            return EncodeOutcome(codeword_slots(spec, m, k), k)
    return EncodeOutcome(SlotSeq.zeros(spec.n, "input"), None)


# --- decoder --------------------------------------------------------------

def _prefix_len(npos: int, theta: int, p: float) -> int:
    """Prefix length for the scan's two-segment overlap check.

    A codeword reaching overlap theta over npos positions must score at
    least theta - (npos - u) on the first u, so stopping there rejects
    losslessly.  u is sized so a Ber(p) codeword fails the prefix test with
    high probability, making the second segment rare.
    """
    slack = npos - theta
    a = 1.0 - p
    if slack <= 0 or a <= 1e-12 or p <= 0.0:
        return npos
    sigma = math.sqrt(p * a)
    x = (3.0 * sigma + math.sqrt(9.0 * sigma * sigma + 4.0 * a * slack)) / (2.0 * a)
    return min(npos, max(32, math.ceil(x * x)))


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _scan_chunk_numba(h1s, ks, pos_keys, thr, theta, u1, out_m, out_k):  # pragma: no cover - numba
        C1 = numba.uint64(0xBF58476D1CE4E5B9)
        C2 = numba.uint64(0x94D049BB133111EB)
        G = numba.uint64(0x9E3779B97F4A7C15)
        npos = pos_keys.shape[0]
        nhit = 0
        for mi in range(h1s.shape[0]):
            h1 = h1s[mi]
            for ki in range(ks.shape[0]):
                z = h1 ^ (ks[ki] + G)
                z = (z ^ (z >> numba.uint64(30))) * C1
                z = (z ^ (z >> numba.uint64(27))) * C2
                h2 = z ^ (z >> numba.uint64(31))
                acc = 0
                for j in range(u1):
                    w = h2 ^ pos_keys[j]
                    w = (w ^ (w >> numba.uint64(30))) * C1
                    w = (w ^ (w >> numba.uint64(27))) * C2
                    w = w ^ (w >> numba.uint64(31))
                    if w < thr:
                        acc += 1
                # the npos - u1 unseen positions can add at most npos - u1
                if acc + (npos - u1) < theta:
                    continue
                for j in range(u1, npos):
                    w = h2 ^ pos_keys[j]
                    w = (w ^ (w >> numba.uint64(30))) * C1
                    w = (w ^ (w >> numba.uint64(27))) * C2
                    w = w ^ (w >> numba.uint64(31))
                    if w < thr:
                        acc += 1
                if acc >= theta:
                    out_m[nhit] = mi
                    out_k[nhit] = ki
                    nhit += 1
        return nhit


def _scan_chunk_numpy(h1s: np.ndarray, ks: np.ndarray, pos_keys: np.ndarray,
                      thr: int, theta: int, u1: int,
                      out_m: np.ndarray, out_k: np.ndarray) -> int:
    G = np.uint64(GOLDEN)
    nhit = 0
    for mi in range(h1s.size):
        h2 = mix64_array(h1s[mi] ^ (ks + G))
        bits = mix64_array(h2[:, None] ^ pos_keys[None, :]) < np.uint64(thr)
        counts = bits.sum(axis=1)
        for ki in np.flatnonzero(counts >= theta):
            out_m[nhit] = mi
            out_k[nhit] = int(ki)
            nhit += 1
    return nhit


def decode(y: SlotSeq, muT: int, spec: CodebookSpec, params: ChannelParams,
           eps: float | None = None,
           use_numba: bool | None = None) -> DecodeOutcome:
    """Exhaustive threshold decode of the received track.

    muT is the stuck-slot count reported by the training phase.  Returns the
    unique qualifying message, or an erasure when none or several distinct
    messages qualify.  The scan is deterministic: among qualifiers of the
    winning message, the smallest (m, k) is reported.
    """
    if y.n != spec.n:
        raise ConfigError("received track length does not match the codebook")
    eps = params.eps if eps is None else eps
    theta = decoder_threshold(muT, spec.n, spec.p, params.A, params.lam,
                              params.delta, eps)
    ones = np.flatnonzero(y.bits).astype(np.uint64)
    if ones.size < theta:
        # overlap can never reach theta: no codeword qualifies
        return DecodeOutcome(None, None, 0)
    if theta <= 0:
        # every codeword qualifies; ambiguous unless a single message exists
        if spec.m_bits == 0:
            return DecodeOutcome(0, 0, 1)
        return DecodeOutcome(None, None, 2)

    thr = bernoulli_threshold(spec.p)
    if thr >= (1 << 64):
        # p = 1: every codeword is all ones, overlap = popcount(y)
        if spec.m_bits == 0:
            return DecodeOutcome(0, 0, 1)
        return DecodeOutcome(None, None, 2)
    keys = position_keys(ones)

    want_numba = HAVE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    scan = _scan_chunk_numba if want_numba else _scan_chunk_numpy
    u1 = _prefix_len(keys.size, theta, spec.p)
    ks = np.arange(spec.num_bins, dtype=np.uint64)
    # chunk size targets a few-millisecond kernel call
    chunk = max(1, min(spec.num_messages, max(1, (1 << 22) // max(1, spec.num_bins * max(keys.size, 1)))))
    h0 = mix64(spec.seed)
    found_m: int | None = None
    found_k: int | None = None
    for m0 in range(0, spec.num_messages, chunk):
        ms = np.arange(m0, min(m0 + chunk, spec.num_messages), dtype=np.uint64)
        h1s = mix64_array(np.uint64(h0) ^ (ms + np.uint64(GOLDEN)))
        out_m = np.empty(ms.size * ks.size, dtype=np.int64)
        out_k = np.empty(ms.size * ks.size, dtype=np.int64)
        nhit = scan(h1s, ks, keys, np.uint64(thr), theta, u1, out_m, out_k)
        for i in range(nhit):
            m = m0 + int(out_m[i])
            k = int(out_k[i])
            if found_m is None:
                found_m, found_k = m, k
            elif m != found_m:
                return DecodeOutcome(None, None, 2)
        # keep scanning: a later distinct message may still force an erasure
    if found_m is None:
        return DecodeOutcome(None, None, 0)
    return DecodeOutcome(found_m, found_k, 1)

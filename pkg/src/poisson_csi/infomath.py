"""Capacity formulas, Blahut-Arimoto, and binomial large-deviation bounds.

All rates are computed internally in nats and converted to bits at the API
boundary; every result carries a units tag (bits/sec or bits/slot).  The
convention 0*log(0) = 0 applies throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .channel import ChannelParams, ConfigError

LN2 = math.log(2.0)


class ConvergenceError(RuntimeError):
    """Iterative solver failed to reach its tolerance within the cap."""


class PrecisionError(ArithmeticError):
    """A numerically exact quantity underflowed or lost its precision."""


def binary_kl(q: float, p: float) -> float:
    """D(Ber(q) || Ber(p)) in nats.

    Parameters
    ----------
    q, p : float
        Bernoulli parameters; q may sit on the boundary, p must give the
        support of q positive mass.
    """
    if not (0.0 <= q <= 1.0 and 0.0 <= p <= 1.0):
        raise ValueError("Bernoulli parameters must lie in [0, 1]")

    def term(a: float, b: float) -> float:
        if a == 0.0:
            return 0.0
        if b == 0.0:
            return math.inf
        return a * math.log(a / b)

    return term(q, p) + term(1.0 - q, 1.0 - p)


def binary_kl_bits(q: float, p: float) -> float:
    """D(Ber(q) || Ber(p)) in bits."""
    return binary_kl(q, p) / LN2


def entropy_bits(dist: np.ndarray) -> float:
    """Shannon entropy of a distribution, in bits."""
    d = np.asarray(dist, dtype=float)
    if d.min() < -1e-12 or abs(d.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability distribution")
    nz = d[d > 0]
    return float(-(nz * np.log2(nz)).sum())


class DmcLaw:
    """A discrete memoryless channel as a row-stochastic matrix W[x, y]."""

    __slots__ = ("W",)

    def __init__(self, W: np.ndarray):
        W = np.asarray(W, dtype=float)
        if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 2:
            raise ConfigError("channel law must be a 2-d matrix")
        if W.min() < 0 or np.max(np.abs(W.sum(axis=1) - 1.0)) > 1e-12:
            raise ConfigError("channel law rows must each sum to 1")
        self.W = W

    @property
    def num_inputs(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class CapacityResult:
    """A capacity value with the distribution that achieves it.

    capacity is in the tagged units; p_star is the optimal ones density
    (duty cycle) when the optimization has one, else None; iterations counts
    solver steps (0 for closed-form/grid results).
    """

    capacity: float
    p_star: float | None
    iterations: int
    units: str
    input_dist: tuple[float, ...] | None = None


def mutual_information_bits(r: np.ndarray, law: DmcLaw) -> float:
    """I(X;Y) in bits for input distribution r over the law's inputs."""
    r = np.asarray(r, dtype=float)
    W = law.W
    if r.shape != (W.shape[0],) or r.min() < -1e-12 or abs(r.sum() - 1) > 1e-9:
        raise ValueError("input distribution does not match the law")
    q = r @ W
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = np.where(W > 0, np.log(np.where(W > 0, W, 1.0) / q), 0.0)
    return float((r[:, None] * W * lr).sum()) / LN2


def blahut_arimoto(law: DmcLaw, tol: float = 1e-12,
                   max_iter: int = 10 ** 6) -> CapacityResult:
    """Channel capacity of a DMC in bits per channel use.

    Iterates the standard alternating maximization until the gap between the
    lower bound I(r) and the upper bound max_x D(W_x || q_r) falls below tol
    (in bits), then returns the lower bound.  Raises ConvergenceError at the
    iteration cap.
    """
    W = law.W
    X = W.shape[0]
    r = np.full(X, 1.0 / X)
    tol_nats = tol * LN2
    support = W > 0
    logW = np.where(support, np.log(np.where(support, W, 1.0)), 0.0)
    for it in range(1, max_iter + 1):
        q = r @ W
        # D_x = sum_y W[x,y] log(W[x,y]/q_y), with 0 log 0 = 0
        with np.errstate(divide="ignore"):
            logq = np.where(q > 0, np.log(np.where(q > 0, q, 1.0)), 0.0)
        D = (W * (logW - logq[None, :]) * support).sum(axis=1)
        lower = float(r @ D)
        upper = float(D.max())
        if upper - lower < tol_nats:
            p_star = float(r[1]) if X == 2 else None
            return CapacityResult(lower / LN2, p_star, it, "bits/slot",
                                  tuple(float(v) for v in r))
        r = r * np.exp(D - upper)
        r /= r.sum()
    raise ConvergenceError(f"no convergence in {max_iter} iterations")


def achievable_rate(p: float, A: float, lam: float) -> float:
    """Rate of a duty-cycle-p peak-limited input, in bits/sec.

    This is (pA+lam) * D(Ber(p(A+lam)/(pA+lam)) || Ber(p)), the rate of a
    continuous-time binary input with ones density p; capacity_poisson
    maximizes it over p.
    """
    if not 0 < p < 1:
        return 0.0
    pa = p * A + lam
    q = p * (A + lam) / pa
    return pa * binary_kl(q, p) / LN2


def capacity_poisson(A: float, lam: float, units: str = "bits") -> CapacityResult:
    """Capacity of the continuous-time peak-limited Poisson channel.

    Returns bits/sec by default (nats/sec when units='nats').  The optimal
    duty cycle is found by a 1e-3 grid scan followed by golden-section
    refinement; at lam=0 this reproduces the closed form A/e with p*=1/e.
    """
    if A <= 0 or lam < 0:
        raise ConfigError("require A > 0 and lam >= 0")
    if units not in ("bits", "nats"):
        raise ConfigError("units must be 'bits' or 'nats'")

    def neg(p: float) -> float:
        return -achievable_rate(p, A, lam)

    grid = np.arange(1e-3, 1.0, 1e-3)
    vals = np.array([neg(p) for p in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 2, 0)]
    hi = grid[min(i + 2, grid.size - 1)]
    res = optimize.minimize_scalar(neg, bracket=(lo, grid[i], hi),
                                   method="golden", options={"xtol": 1e-13})
    cap_bits = -res.fun
    cap = cap_bits if units == "bits" else cap_bits * LN2
    return CapacityResult(cap, float(res.x), int(res.nfev),
                          f"{units}/sec")


def discrete_capacity(params: ChannelParams,
                      law_mode: str = "linearized") -> CapacityResult:
    """C_Delta: capacity of the slotted binary channel, in bits/slot."""
    p0, p1 = params.slot_law(law_mode)
    law = DmcLaw(np.array([[1 - p0, p0], [1 - p1, p1]]))
    return blahut_arimoto(law, tol=1e-13)


@dataclass(frozen=True)
class SanovResult:
    """Exact binomial tail with its large-deviation rate and upper bound.

    exact_tail = P[Bin(n,p) >= ceil(q*n)]; rate = D(Ber(q)||Ber(p)) in bits
    per sample; bound = (n+1) * 2^(-n*rate), the polynomial-prefactor upper
    bound on the decaying tail.
    """

    n: int
    p: float
    q: float
    exact_tail: float
    rate: float
    bound: float


def sanov_binomial_exponent(n: int, p: float, q: float) -> SanovResult:
    """Exact upper-tail probability of a binomial against its Sanov bound."""
    if n < 1 or not (0 < p < 1) or not (p <= q <= 1):
        raise ConfigError("require n >= 1, 0 < p < 1, p <= q <= 1")
    k = math.ceil(q * n)
    tail = float(stats.binom.sf(k - 1, n, p))
    if not (tail > 0.0 and math.isfinite(tail)):
        # a binomial upper tail with 0 < p < 1 is strictly positive, so a
        # zero here means the double-precision summation underflowed
        raise PrecisionError(f"tail underflow at n={n}, q={q}, p={p}")
    rate = binary_kl_bits(q, p)
    bound = (n + 1) * math.pow(2.0, -n * rate) if n * rate < 1e6 else 0.0
    return SanovResult(n, p, q, tail, rate, bound)

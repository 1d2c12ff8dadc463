"""Slot-level capacity with causal state knowledge via Shannon strategies.

The input alphabet becomes the four maps u: state -> input.  A stuck slot
(probability q per slot) forces output 1 no matter what the map orders, so
the output law depends on u only through u(0) and knowing the state as it
happens buys nothing: max I(U;Y) collapses to the no-knowledge capacity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .channel import ChannelParams, ConfigError
from .infomath import CapacityResult, DmcLaw, blahut_arimoto, discrete_capacity

STRATEGIES: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class StrategyChannel:
    """Output law of the four state-to-input maps; rows ordered (u(0),u(1))."""

    law: tuple[tuple[float, float], ...]
    state_prob: float
    strategies: tuple[tuple[int, int], ...] = STRATEGIES

    def __post_init__(self) -> None:
        if len(self.law) != 4:
            raise ConfigError("strategy channel needs exactly four rows")
        for row in self.law:
            if abs(sum(row) - 1.0) > 1e-12 or min(row) < 0:
                raise ConfigError("law rows must be distributions")
        if not 0.0 <= self.state_prob <= 1.0:
            raise ConfigError("state_prob must lie in [0, 1]")
        if self.law[0] != self.law[1] or self.law[2] != self.law[3]:
            raise ConfigError("rows must agree within equal u(0)")

    @classmethod
    def from_q(cls, p0: float, p1: float, q: float) -> "StrategyChannel":
        """Unguarded direct build: P(1|u) = (1-q)*W(1|u(0),0) + q."""
        rows = []
        for u0, _u1 in STRATEGIES:
            w1 = p1 if u0 == 1 else p0
            on = (1.0 - q) * w1 + q
            rows.append((1.0 - on, on))
        return cls(law=tuple(rows), state_prob=q)

    def dmc(self) -> DmcLaw:
        return DmcLaw([list(row) for row in self.law])


def build_strategy_channel(params: ChannelParams,
                           mu: float) -> StrategyChannel:
    """Strategy table at spurious-count intensity mu (counts/sec)."""
    if mu < 0:
        raise ConfigError("mu must be nonnegative")
    q = mu * params.delta
    if q >= 0.1:
        raise ConfigError("mu*delta must stay below 0.1")
    p0, p1 = params.slot_law("linearized")
    return StrategyChannel.from_q(p0, p1, q)


def causal_capacity(params: ChannelParams, mu: float,
                    tol: float = 1e-9) -> CapacityResult:
    """max I(U;Y) over strategy distributions, bits per slot.

    p_star reports the effective duty cycle: the mass on maps with u(0)=1.
    """
    chan = build_strategy_channel(params, mu)
    res = blahut_arimoto(chan.dmc(), tol=tol)
    duty = res.input_dist[2] + res.input_dist[3]
    return replace(res, p_star=duty)


def no_csi_capacity(params: ChannelParams, mu: float,
                    tol: float = 1e-9) -> CapacityResult:
    """max I(X;Y) with the state marginalized in, bits per slot."""
    if mu < 0:
        raise ConfigError("mu must be nonnegative")
    q = mu * params.delta
    if q > 1.0:
        raise ConfigError("mu*delta must not exceed 1")
    if q == 0.0:
        return discrete_capacity(params)
    p0, p1 = params.slot_law("linearized")
    on0 = (1.0 - q) * p0 + q
    on1 = (1.0 - q) * p1 + q
    law = DmcLaw([[1.0 - on0, on0], [1.0 - on1, on1]])
    return blahut_arimoto(law, tol=tol)


def strategy_marginalize(p_u) -> tuple[float, float]:
    """Project a strategy distribution onto inputs: P(x) = sum over u(0)=x."""
    if len(p_u) != 4:
        raise ConfigError("need a distribution over the four strategies")
    if min(p_u) < -1e-15 or abs(sum(p_u) - 1.0) > 1e-12:
        raise ConfigError("not a probability distribution")
    return (p_u[0] + p_u[1], p_u[2] + p_u[3])

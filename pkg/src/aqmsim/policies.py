"""Drop-decision engines: RED, ERED, and the delay-aware hybrid.

All three share the linear drop-probability ramp, the inter-drop ``count``
spreading mechanism, and (for ERED/hybrid) a set of thresholds derived from
the RED pair. The hybrid differs from ERED only by adding a weighted
estimated-delay term to the probabilistic drop branch.
"""
from __future__ import annotations

from dataclasses import dataclass

from .rng import SplitMix64


@dataclass(frozen=True)
class RedParams:
    """Classic RED knobs: threshold pair, ceiling probability, queue weight."""

    min_th: float
    max_th: float
    max_p: float = 0.1
    queue_weight: float = 0.002

    def __post_init__(self):
        if not 0 <= self.min_th < self.max_th:
            raise ValueError("thresholds must satisfy 0 <= min_th < max_th")
        if not 0.0 < self.max_p <= 1.0:
            raise ValueError("max_p must be in (0, 1]")
        if not 0.0 < self.queue_weight <= 1.0:
            raise ValueError("queue_weight must be in (0, 1]")


@dataclass(frozen=True)
class DerivedThresholds:
    """Secondary positions computed from the RED pair."""

    min_th2: float
    max_th2: float
    max_th3: float


@dataclass(frozen=True)
class HybridParams:
    """RED parameters plus the weight of the estimated-delay term."""

    red: RedParams
    delay_weight: float = 0.05

    def __post_init__(self):
        if self.delay_weight < 0.0:
            raise ValueError("delay_weight cannot be negative")


@dataclass
class PolicyState:
    """Packets evaluated since the last drop; -1 while outside drop regions."""

    count: int = -1


@dataclass(frozen=True)
class Decision:
    """Outcome of one arrival evaluation; ``dp`` is the probability used."""

    drop: bool
    dp: float


def clamp01(x: float) -> float:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


def derive_thresholds(params: RedParams) -> DerivedThresholds:
    """Secondary thresholds: midpoint offset and 1.75x / 2x of max_th."""
    return DerivedThresholds(
        min_th2=(params.max_th + params.min_th) / 2.0 + params.min_th,
        max_th2=1.75 * params.max_th,
        max_th3=2.0 * params.max_th,
    )


def base_drop_probability(avg: float, params: RedParams) -> float:
    """Linear ramp max_p*(avg-min_th)/(max_th-min_th), clamped to [0, 1]."""
    return clamp01(params.max_p * (avg - params.min_th) / (params.max_th - params.min_th))


def count_adjust(dp_base: float, count: int) -> float:
    """Inflate dp_base by packets since the last drop: dp/(1 - count*dp).

    Returns 1.0 once count*dp_base reaches 1 (the spread is exhausted).
    """
    prod = count * dp_base
    if prod >= 1.0:
        return 1.0
    return clamp01(dp_base / (1.0 - prod))


def red_decide(
    state: PolicyState,
    params: RedParams,
    avg: float,
    q: int,
    rng: SplitMix64,
) -> Decision:
    """Classic RED: no drops below min_th, forced drops at and above max_th,
    probabilistic drops on the ramp in between. Mutates ``state.count``."""
    if avg < params.min_th:
        state.count = -1
        return Decision(False, 0.0)
    if avg < params.max_th:
        state.count += 1
        dp = count_adjust(base_drop_probability(avg, params), state.count)
        if rng.uniform() < dp:
            state.count = 0
            return Decision(True, dp)
        return Decision(False, dp)
    state.count = 0
    return Decision(True, 1.0)


def _ered_core(
    state: PolicyState,
    params: RedParams,
    th: DerivedThresholds,
    avg: float,
    q: int,
    delay_term: float,
    rng: SplitMix64,
) -> Decision:
    # Branch order matters: the forced-drop test comes after the two
    # probabilistic regions, exactly as in the scenario definitions.
    if th.min_th2 <= avg < th.max_th3 and q >= th.min_th2:
        state.count += 1
        dp = clamp01(count_adjust(base_drop_probability(avg, params), state.count) + delay_term)
        if rng.uniform() < dp:
            state.count = 0
            return Decision(True, dp)
        return Decision(False, dp)
    if avg < th.min_th2 and q > th.max_th2:
        state.count += 1
        dp = count_adjust(params.max_p, state.count)
        if rng.uniform() < dp:
            state.count = 0
            return Decision(True, dp)
        return Decision(False, dp)
    if avg >= th.max_th3:
        state.count = 0
        return Decision(True, 1.0)
    state.count = -1
    return Decision(False, 0.0)


def ered_decide(
    state: PolicyState,
    params: RedParams,
    th: DerivedThresholds,
    avg: float,
    q: int,
    rng: SplitMix64,
) -> Decision:
    """ERED: instantaneous occupancy gates the drop regions.

    Scenarios: (a) avg in [min_th2, max_th3) and q >= min_th2 drops on the
    count-adjusted ramp probability; (b) avg < min_th2 with q > max_th2 drops
    on the count-adjusted ceiling max_p; (c) avg >= max_th3 drops everything;
    otherwise no drop and the count resets to -1.
    """
    return _ered_core(state, params, th, avg, q, 0.0, rng)


def hybrid_decide(
    state: PolicyState,
    params: HybridParams,
    th: DerivedThresholds,
    avg: float,
    q: int,
    d_esti: float,
    rng: SplitMix64,
) -> Decision:
    """ERED scenarios with the weighted delay estimate added in scenario (a).

    With delay_weight == 0 this is decision-for-decision identical to ERED
    under a shared random stream.
    """
    if d_esti < 0:
        raise ValueError("d_esti cannot be negative")
    return _ered_core(state, params.red, th, avg, q, params.delay_weight * d_esti, rng)

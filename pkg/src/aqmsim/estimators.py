"""Rolling congestion statistics.

EWMA average queue length with idle decay, per-slot arrival/departure rate
filters, and the estimated queuing delay derived from them.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

# Guard for the rate ratio before any departure has been observed.
DEP_RATE_EPS = 1e-6


def ewma_step(value: float, weight: float, observed: float) -> float:
    """One low-pass filter step: (1-w)*value + w*observed."""
    return (1.0 - weight) * value + weight * observed


def idle_decay(value: float, weight: float, idle_slots: int) -> float:
    """Decay toward zero over a whole idle period: value * (1-w)**idle_slots."""
    return value * (1.0 - weight) ** float(idle_slots)


def delay_from_rates(arr_rate: float, dep_rate: float, q: float) -> float:
    """Estimated queuing delay in slots: (arrival rate / departure rate) * q."""
    if dep_rate > DEP_RATE_EPS:
        return (arr_rate / dep_rate) * q
    return q / DEP_RATE_EPS


@dataclass(frozen=True)
class AvgQueueEstimator:
    """Low-pass filtered average queue length."""

    value: float = 0.0
    weight: float = 0.002

    def __post_init__(self):
        if not 0.0 < self.weight <= 1.0:
            raise ValueError("queue weight must be in (0, 1]")
        if self.value < 0.0:
            raise ValueError("average queue length cannot be negative")


@dataclass(frozen=True)
class RateEstimator:
    """Low-pass filtered per-slot event rate.

    Weights below 0.5 give more contribution to past observations, which is
    what keeps the filtered rate stable under bursty slot traffic.
    """

    value: float = 0.0
    weight: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.weight < 0.5:
            raise ValueError("rate weight must be in (0, 0.5)")
        if self.value < 0.0:
            raise ValueError("rate cannot be negative")


@dataclass(frozen=True)
class DelayEstimate:
    """Estimated queuing delay, in slots."""

    value: float


def update_avg_nonempty(est: AvgQueueEstimator, q: float) -> AvgQueueEstimator:
    """Average update when the queue holds packets."""
    if q < 0:
        raise ValueError("q cannot be negative")
    return replace(est, value=ewma_step(est.value, est.weight, q))


def update_avg_idle(est: AvgQueueEstimator, idle_slots: int) -> AvgQueueEstimator:
    """Average update after ``idle_slots`` whole slots of an empty queue."""
    if idle_slots < 0:
        raise ValueError("idle_slots cannot be negative")
    return replace(est, value=idle_decay(est.value, est.weight, idle_slots))


def update_rate(est: RateEstimator, observed: float) -> RateEstimator:
    """Fold one per-slot observation (packets seen this slot) into the rate."""
    if observed < 0:
        raise ValueError("observed count cannot be negative")
    return replace(est, value=ewma_step(est.value, est.weight, observed))


def estimate_delay(arr: RateEstimator, dep: RateEstimator, q: float) -> DelayEstimate:
    """Delay indicator for the current occupancy ``q``."""
    if q < 0:
        raise ValueError("q cannot be negative")
    return DelayEstimate(delay_from_rates(arr.value, dep.value, q))


def update_rates_per_slot(
    arr: RateEstimator,
    dep: RateEstimator,
    q_full: bool,
    arrived: int,
    departed: int,
) -> tuple[RateEstimator, RateEstimator]:
    """One per-slot rate update.

    The departure filter always advances. The arrival filter is frozen while
    the buffer is full: packets turned away at a full buffer never arrive at
    the queue, so the offered rate cannot be observed.
    """
    new_dep = update_rate(dep, departed)
    new_arr = arr if q_full else update_rate(arr, arrived)
    return new_arr, new_dep

"""Slot-based experiment engine.

Bernoulli arrivals and departures on discrete slots, a warm-up window whose
statistics are discarded, one drop policy wired into the arrival path, and
counters reduced to a SimReport. The hot loop runs on the compiled kernel
when available and on the pure-Python fallback otherwise; both produce
bit-identical results for the same configuration.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import _pykernel
from .fuzzy import FisConfig, InferenceTables
from .policies import DerivedThresholds, HybridParams, RedParams, derive_thresholds
from .rng import derive_streams

try:
    from . import _kernel

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build environment
    _kernel = None
    HAVE_COMPILED = False


def _default_backend() -> str:
    forced = os.environ.get("AQMSIM_BACKEND")
    if forced in ("compiled", "python"):
        return forced
    return "compiled" if HAVE_COMPILED else "python"


BACKEND = _default_backend()


@dataclass(frozen=True)
class RedPolicy:
    params: RedParams
    name = "red"


@dataclass(frozen=True)
class EredPolicy:
    params: RedParams
    name = "ered"


@dataclass(frozen=True)
class HybridPolicy:
    params: HybridParams
    name = "hybrid"


@dataclass(frozen=True)
class FuzzyPolicy:
    fis: FisConfig
    queue_weight: float = 0.002
    name = "fuzzy"

    def __post_init__(self):
        if not 0.0 < self.queue_weight <= 1.0:
            raise ValueError("queue_weight must be in (0, 1]")


PolicyConfig = Union[RedPolicy, EredPolicy, HybridPolicy, FuzzyPolicy]


@dataclass(frozen=True)
class SimConfig:
    """One run: traffic regime, buffer, policy, estimator weights, seed."""

    arrival_prob: float
    departure_prob: float
    policy: PolicyConfig
    total_slots: int = 2_000_000
    warmup_slots: int = 800_000
    capacity: int = 20
    arrival_weight: float = 0.2
    departure_weight: float = 0.2
    seed: int = 42

    def validate(self) -> None:
        if not 0.0 <= self.arrival_prob <= 1.0:
            raise ValueError("arrival_prob must be in [0, 1]")
        if not 0.0 <= self.departure_prob <= 1.0:
            raise ValueError("departure_prob must be in [0, 1]")
        if self.total_slots < 1:
            raise ValueError("total_slots must be positive")
        if not 0 <= self.warmup_slots < self.total_slots:
            raise ValueError("warmup_slots must be in [0, total_slots)")
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        for label in ("arrival_weight", "departure_weight"):
            w = getattr(self, label)
            if not 0.0 < w < 0.5:
                raise ValueError(f"{label} must be in (0, 0.5)")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if not isinstance(self.policy, (RedPolicy, EredPolicy, HybridPolicy, FuzzyPolicy)):
            raise ValueError("unknown policy configuration")

    def traffic_key(self) -> tuple:
        """Everything that shapes the arrival/departure event stream."""
        return (
            self.arrival_prob,
            self.departure_prob,
            self.total_slots,
            self.warmup_slots,
            self.capacity,
            self.arrival_weight,
            self.departure_weight,
            self.seed,
        )


@dataclass(frozen=True)
class SimReport:
    """Counters and derived metrics over the measured window."""

    arrived: int
    departed: int
    loss: int
    dropped: int
    missed: int
    delay_mean: float
    mql: float
    throughput: float
    occupancy_at_warmup: int
    occupancy_at_end: int

    def residual_delta(self) -> int:
        return self.occupancy_at_end - self.occupancy_at_warmup


@dataclass
class KernelArgs:
    """Flattened inputs consumed by both kernels."""

    arrival_prob: float
    departure_prob: float
    total_slots: int
    warmup_slots: int
    capacity: int
    policy_kind: int
    red_params: Optional[RedParams]
    thresholds: Optional[DerivedThresholds]
    queue_weight: float
    delay_weight: float
    arrival_weight: float
    departure_weight: float
    traffic_seed: int
    decision_seed: int
    tables: Optional[InferenceTables] = None
    # numpy views of the fuzzy tables, for the compiled kernel
    q_degrees: Optional[np.ndarray] = None
    avg_terms: Optional[np.ndarray] = None
    rules: Optional[np.ndarray] = None
    grid_x: Optional[np.ndarray] = None
    mf_grid: Optional[np.ndarray] = None
    min_th: float = 0.0
    max_th: float = 1.0
    max_p: float = 1.0
    min_th2: float = 0.0
    max_th2: float = 0.0
    max_th3: float = 0.0

    def __post_init__(self):
        if self.red_params is not None:
            self.min_th = self.red_params.min_th
            self.max_th = self.red_params.max_th
            self.max_p = self.red_params.max_p
        if self.thresholds is not None:
            self.min_th2 = self.thresholds.min_th2
            self.max_th2 = self.thresholds.max_th2
            self.max_th3 = self.thresholds.max_th3


def _kernel_args(config: SimConfig) -> KernelArgs:
    traffic_seed, decision_seed = derive_streams(config.seed)
    policy = config.policy
    if isinstance(policy, RedPolicy):
        kind, red, th = _pykernel.POLICY_RED, policy.params, None
        queue_weight, delay_weight = policy.params.queue_weight, 0.0
    elif isinstance(policy, EredPolicy):
        kind, red, th = _pykernel.POLICY_ERED, policy.params, derive_thresholds(policy.params)
        queue_weight, delay_weight = policy.params.queue_weight, 0.0
    elif isinstance(policy, HybridPolicy):
        kind, red, th = _pykernel.POLICY_HYBRID, policy.params.red, derive_thresholds(policy.params.red)
        queue_weight, delay_weight = policy.params.red.queue_weight, policy.params.delay_weight
    else:
        kind, red, th = _pykernel.POLICY_FUZZY, None, None
        queue_weight, delay_weight = policy.queue_weight, policy.fis.delay_weight

    args = KernelArgs(
        arrival_prob=config.arrival_prob,
        departure_prob=config.departure_prob,
        total_slots=config.total_slots,
        warmup_slots=config.warmup_slots,
        capacity=config.capacity,
        policy_kind=kind,
        red_params=red,
        thresholds=th,
        queue_weight=queue_weight,
        delay_weight=delay_weight,
        arrival_weight=config.arrival_weight,
        departure_weight=config.departure_weight,
        traffic_seed=traffic_seed,
        decision_seed=decision_seed,
    )
    if kind == _pykernel.POLICY_FUZZY:
        tables = InferenceTables(policy.fis, config.capacity)
        args.tables = tables
        args.q_degrees = np.asarray(tables.q_degrees, dtype=np.float64)
        args.avg_terms = np.asarray(tables.avg_terms, dtype=np.float64)
        args.rules = np.asarray(tables.rules, dtype=np.int32)
        args.grid_x = np.asarray(tables.grid_x, dtype=np.float64)
        args.mf_grid = np.asarray(tables.mf_grid, dtype=np.float64)
    else:
        # placeholder arrays so the compiled kernel's typed views bind
        args.q_degrees = np.zeros((1, 1), dtype=np.float64)
        args.avg_terms = np.zeros((1, 4), dtype=np.float64)
        args.rules = np.zeros((1, 3), dtype=np.int32)
        args.grid_x = np.zeros(1, dtype=np.float64)
        args.mf_grid = np.zeros((1, 1), dtype=np.float64)
    return args


def _resolve_backend(backend: Optional[str]) -> str:
    chosen = backend or BACKEND
    if chosen not in ("compiled", "python"):
        raise ValueError("backend must be 'compiled' or 'python'")
    if chosen == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernel is not available in this installation")
    return chosen


def run(config: SimConfig, backend: Optional[str] = None) -> SimReport:
    """Execute one run; a pure function of the configuration."""
    config.validate()
    args = _kernel_args(config)
    if _resolve_backend(backend) == "compiled":
        raw = _kernel.run_kernel(args)
    else:
        raw = _pykernel.run_kernel(args)

    measured_slots = config.total_slots - config.warmup_slots
    departed = raw["departed"]
    report = SimReport(
        arrived=raw["arrived"],
        departed=departed,
        loss=raw["loss"],
        dropped=raw["dropped"],
        missed=raw["loss"] + raw["dropped"],
        delay_mean=raw["delay_sum"] / departed if departed else 0.0,
        mql=raw["mql_sum"] / measured_slots,
        throughput=departed / measured_slots,
        occupancy_at_warmup=raw["occ_warm"],
        occupancy_at_end=raw["occ_end"],
    )
    balance = report.departed + report.loss + report.dropped + report.residual_delta()
    if report.arrived != balance:
        raise RuntimeError(
            f"packet conservation violated: arrived={report.arrived} accounted={balance}"
        )
    return report


def run_pair_seeded(
    configs: Sequence[SimConfig], backend: Optional[str] = None
) -> list[SimReport]:
    """Run several policies against one shared traffic realization.

    All configurations must agree on every traffic-shaping field (including
    the seed) and differ only in policy; traffic and decision draws come from
    separate streams, so each policy sees the identical arrival/departure
    event sequence.
    """
    if not configs:
        raise ValueError("need at least one configuration")
    key = configs[0].traffic_key()
    for cfg in configs[1:]:
        if cfg.traffic_key() != key:
            raise ValueError("configurations must differ only in policy")
    return [run(cfg, backend=backend) for cfg in configs]

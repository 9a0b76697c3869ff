"""Experiment configuration: defaults, JSON document schema, validation.

The config document has four sections: ``traffic`` (shared regime and
estimator weights), ``policy.<name>`` (per-policy parameters for red, ered,
hybrid), ``fuzzy`` (memberships as 4-element corner arrays plus rules as
{q, avg, dp} label triples), and ``sweep`` (policies x arrival probabilities
x seeds, output format).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from .fuzzy import FisConfig, FuzzyRule, LinguisticVariable
from .policies import HybridParams, RedParams
from .simulator import (
    EredPolicy,
    FuzzyPolicy,
    HybridPolicy,
    RedPolicy,
    SimConfig,
    run_pair_seeded,
)

POLICY_NAMES = ("red", "ered", "hybrid", "fuzzy")
OUTPUT_FORMATS = ("csv", "json", "table")

# Shipped operating point: saturated 0.5-departure link behind a 20-packet
# buffer, classic RED thresholds, and the tuned estimator/delay weights.
DEFAULT_DEPARTURE_PROB = 0.5
DEFAULT_TOTAL_SLOTS = 2_000_000
DEFAULT_WARMUP_SLOTS = 800_000
DEFAULT_CAPACITY = 20
DEFAULT_QUEUE_WEIGHT = 0.002
DEFAULT_MAX_P = 0.1
DEFAULT_MIN_TH = 3
DEFAULT_MAX_TH = 9
DEFAULT_DELAY_WEIGHT = 0.05
DEFAULT_RATE_WEIGHT = 0.2
DEFAULT_ARRIVAL_PROBS = (0.33, 0.5, 0.66, 0.93)
DEFAULT_SEED = 42
DEFAULT_COG_STEP = 0.001


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def default_document() -> dict:
    """The full default configuration as a JSON-serializable document."""
    from .fuzzy import DEFAULT_AVG_CORNERS, DEFAULT_DP_CORNERS, DEFAULT_Q_CORNERS, DEFAULT_RULES

    red = {
        "min_th": DEFAULT_MIN_TH,
        "max_th": DEFAULT_MAX_TH,
        "max_p": DEFAULT_MAX_P,
        "queue_weight": DEFAULT_QUEUE_WEIGHT,
    }
    return {
        "traffic": {
            "departure_prob": DEFAULT_DEPARTURE_PROB,
            "total_slots": DEFAULT_TOTAL_SLOTS,
            "warmup_slots": DEFAULT_WARMUP_SLOTS,
            "capacity": DEFAULT_CAPACITY,
            "arrival_weight": DEFAULT_RATE_WEIGHT,
            "departure_weight": DEFAULT_RATE_WEIGHT,
        },
        "policy": {
            "red": dict(red),
            "ered": dict(red),
            "hybrid": dict(red, delay_weight=DEFAULT_DELAY_WEIGHT),
        },
        "fuzzy": {
            "queue_weight": DEFAULT_QUEUE_WEIGHT,
            "delay_weight": DEFAULT_DELAY_WEIGHT,
            "cog_step": DEFAULT_COG_STEP,
            "memberships": {
                "q": {label: list(corners) for label, corners in DEFAULT_Q_CORNERS},
                "avg": {label: list(corners) for label, corners in DEFAULT_AVG_CORNERS},
                "dp": {label: list(corners) for label, corners in DEFAULT_DP_CORNERS},
            },
            "rules": [
                {"q": r.q_term, "avg": r.avg_term, "dp": r.dp_term} for r in DEFAULT_RULES
            ],
        },
        "sweep": {
            "policies": list(POLICY_NAMES),
            "arrival_probs": list(DEFAULT_ARRIVAL_PROBS),
            "seeds": [DEFAULT_SEED],
            "format": "table",
        },
    }


@dataclass(frozen=True)
class ExperimentSpec:
    """A validated sweep: traffic template, per-policy parameters, grid."""

    departure_prob: float
    total_slots: int
    warmup_slots: int
    capacity: int
    arrival_weight: float
    departure_weight: float
    red: RedParams
    ered: RedParams
    hybrid: HybridParams
    fis: FisConfig
    fuzzy_queue_weight: float
    policies: tuple[str, ...]
    arrival_probs: tuple[float, ...]
    seeds: tuple[int, ...]
    output_format: str

    def policy_config(self, name: str):
        if name == "red":
            return RedPolicy(self.red)
        if name == "ered":
            return EredPolicy(self.ered)
        if name == "hybrid":
            return HybridPolicy(self.hybrid)
        if name == "fuzzy":
            return FuzzyPolicy(self.fis, queue_weight=self.fuzzy_queue_weight)
        raise ConfigError(f"unknown policy {name!r}")

    def sim_config(self, name: str, arrival_prob: float, seed: int) -> SimConfig:
        return SimConfig(
            arrival_prob=arrival_prob,
            departure_prob=self.departure_prob,
            policy=self.policy_config(name),
            total_slots=self.total_slots,
            warmup_slots=self.warmup_slots,
            capacity=self.capacity,
            arrival_weight=self.arrival_weight,
            departure_weight=self.departure_weight,
            seed=seed,
        )


def _get_number(section: dict, path: str, key: str, lo=None, hi=None, integer=False):
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{path}.{key}: must be >= {lo}, got {value!r}")
    if hi is not None and value > hi:
        raise ConfigError(f"{path}.{key}: must be <= {hi}, got {value!r}")
    return int(value) if integer else float(value)


def _check_keys(section: dict, path: str, allowed: set[str]) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown field {sorted(unknown)[0]!r}")


def _variable_from_doc(name: str, section: Any, path: str) -> LinguisticVariable:
    if not isinstance(section, dict) or not section:
        raise ConfigError(f"{path}: expected a non-empty object of label -> 4 corners")
    corners = []
    for label, arr in section.items():
        if (
            not isinstance(arr, list)
            or len(arr) != 4
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in arr)
        ):
            raise ConfigError(f"{path}.{label}: expected an array of 4 numbers")
        corners.append((str(label), tuple(float(v) for v in arr)))
    try:
        return LinguisticVariable.from_corners(name, corners)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _fis_from_doc(doc: dict) -> tuple[FisConfig, float]:
    path = "fuzzy"
    _check_keys(doc, path, {"queue_weight", "delay_weight", "cog_step", "memberships", "rules"})
    queue_weight = _get_number(doc, path, "queue_weight", lo=1e-9, hi=1.0)
    delay_weight = _get_number(doc, path, "delay_weight", lo=0.0)
    cog_step = _get_number(doc, path, "cog_step", lo=1e-9, hi=0.01)
    memberships = doc["memberships"]
    if not isinstance(memberships, dict):
        raise ConfigError(f"{path}.memberships: expected an object")
    _check_keys(memberships, f"{path}.memberships", {"q", "avg", "dp"})
    q_var = _variable_from_doc("q", memberships.get("q"), f"{path}.memberships.q")
    avg_var = _variable_from_doc("avg", memberships.get("avg"), f"{path}.memberships.avg")
    dp_var = _variable_from_doc("dp", memberships.get("dp"), f"{path}.memberships.dp")
    rules_doc = doc["rules"]
    if not isinstance(rules_doc, list) or not rules_doc:
        raise ConfigError(f"{path}.rules: expected a non-empty array")
    rules = []
    for i, entry in enumerate(rules_doc):
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}.rules[{i}]: expected an object")
        _check_keys(entry, f"{path}.rules[{i}]", {"q", "avg", "dp"})
        q_term = entry.get("q")
        avg_term = entry.get("avg")
        dp_term = entry.get("dp")
        if dp_term is None:
            raise ConfigError(f"{path}.rules[{i}].dp: required")
        try:
            rules.append(FuzzyRule(q_term, avg_term, dp_term))
        except ValueError as exc:
            raise ConfigError(f"{path}.rules[{i}]: {exc}") from exc
    try:
        fis = FisConfig(
            q_var=q_var,
            avg_var=avg_var,
            dp_var=dp_var,
            rules=tuple(rules),
            cog_step=cog_step,
            delay_weight=delay_weight,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return fis, queue_weight


def _red_from_doc(doc: dict, path: str, with_delay: bool = False) -> dict:
    allowed = {"min_th", "max_th", "max_p", "queue_weight"}
    if with_delay:
        allowed.add("delay_weight")
    _check_keys(doc, path, allowed)
    fields = {
        "min_th": _get_number(doc, path, "min_th", lo=0),
        "max_th": _get_number(doc, path, "max_th", lo=0),
        "max_p": _get_number(doc, path, "max_p", lo=1e-9, hi=1.0),
        "queue_weight": _get_number(doc, path, "queue_weight", lo=1e-9, hi=1.0),
    }
    if fields["min_th"] >= fields["max_th"]:
        raise ConfigError(f"{path}.min_th: must be below max_th")
    return fields


def _merge(base: dict, override: Optional[dict], path: str) -> dict:
    if override is None:
        return base
    if not isinstance(override, dict):
        raise ConfigError(f"{path}: expected an object")
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            merged[key] = _merge(base[key], value, f"{path}.{key}")
        else:
            merged[key] = value
    return merged


def spec_from_document(doc: dict) -> ExperimentSpec:
    """Validate a (possibly partial) document against the defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object at top level")
    _check_keys(doc, "config", {"traffic", "policy", "fuzzy", "sweep"})
    full = _merge(default_document(), doc, "config")

    traffic = full["traffic"]
    _check_keys(
        traffic,
        "traffic",
        {"departure_prob", "total_slots", "warmup_slots", "capacity",
         "arrival_weight", "departure_weight"},
    )
    departure_prob = _get_number(traffic, "traffic", "departure_prob", lo=0.0, hi=1.0)
    total_slots = _get_number(traffic, "traffic", "total_slots", lo=1, integer=True)
    warmup_slots = _get_number(traffic, "traffic", "warmup_slots", lo=0, integer=True)
    if warmup_slots >= total_slots:
        raise ConfigError("traffic.warmup_slots: must be below total_slots")
    capacity = _get_number(traffic, "traffic", "capacity", lo=1, integer=True)
    arrival_weight = _get_number(traffic, "traffic", "arrival_weight", lo=1e-9, hi=0.5 - 1e-12)
    departure_weight = _get_number(traffic, "traffic", "departure_weight", lo=1e-9, hi=0.5 - 1e-12)

    policy_doc = full["policy"]
    _check_keys(policy_doc, "policy", {"red", "ered", "hybrid"})
    red_fields = _red_from_doc(policy_doc["red"], "policy.red")
    ered_fields = _red_from_doc(policy_doc["ered"], "policy.ered")
    hybrid_doc = policy_doc["hybrid"]
    hybrid_fields = _red_from_doc(hybrid_doc, "policy.hybrid", with_delay=True)
    hybrid_delay = _get_number(hybrid_doc, "policy.hybrid", "delay_weight", lo=0.0) \
        if "delay_weight" in hybrid_doc else DEFAULT_DELAY_WEIGHT

    fis, fuzzy_queue_weight = _fis_from_doc(full["fuzzy"])

    sweep = full["sweep"]
    _check_keys(sweep, "sweep", {"policies", "arrival_probs", "seeds", "format"})
    policies = sweep["policies"]
    if not isinstance(policies, list) or not policies:
        raise ConfigError("sweep.policies: expected a non-empty array")
    for i, name in enumerate(policies):
        if name not in POLICY_NAMES:
            raise ConfigError(f"sweep.policies[{i}]: unknown policy {name!r}")
    arrival_probs = sweep["arrival_probs"]
    if not isinstance(arrival_probs, list) or not arrival_probs:
        raise ConfigError("sweep.arrival_probs: expected a non-empty array")
    for i, p in enumerate(arrival_probs):
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
            raise ConfigError(f"sweep.arrival_probs[{i}]: expected a probability in [0, 1], got {p!r}")
    seeds = sweep["seeds"]
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError("sweep.seeds: expected a non-empty array")
    for i, s in enumerate(seeds):
        if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < (1 << 64):
            raise ConfigError(f"sweep.seeds[{i}]: expected an unsigned 64-bit integer, got {s!r}")
    output_format = sweep["format"]
    if output_format not in OUTPUT_FORMATS:
        raise ConfigError(f"sweep.format: expected one of {OUTPUT_FORMATS}, got {output_format!r}")

    try:
        return ExperimentSpec(
            departure_prob=departure_prob,
            total_slots=total_slots,
            warmup_slots=warmup_slots,
            capacity=capacity,
            arrival_weight=arrival_weight,
            departure_weight=departure_weight,
            red=RedParams(**red_fields),
            ered=RedParams(**ered_fields),
            hybrid=HybridParams(RedParams(**hybrid_fields), delay_weight=hybrid_delay),
            fis=fis,
            fuzzy_queue_weight=fuzzy_queue_weight,
            policies=tuple(policies),
            arrival_probs=tuple(float(p) for p in arrival_probs),
            seeds=tuple(int(s) for s in seeds),
            output_format=output_format,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_spec(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentSpec:
    """Load defaults, then the optional file, then programmatic overrides."""
    doc: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"{path}: file not found") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    doc = _merge(doc, overrides, "config") if overrides else doc
    return spec_from_document(doc)


@dataclass(frozen=True)
class ResultRow:
    """One (policy, arrival probability, seed) outcome, flattened."""

    policy: str
    arrival_prob: float
    seed: int
    arrived: int
    departed: int
    loss: int
    dropped: int
    missed: int
    delay: float
    mql: float
    throughput: float


def run_experiment(spec: ExperimentSpec, backend: Optional[str] = None) -> list[ResultRow]:
    """Run the full sweep.

    Policies sharing an (arrival probability, seed) cell run against the same
    traffic realization. Row order is deterministic: policy in spec order,
    then arrival probability ascending, then seed in spec order.
    """
    cells: dict[tuple[str, float, int], ResultRow] = {}
    for arrival_prob in spec.arrival_probs:
        for seed in spec.seeds:
            configs = [spec.sim_config(name, arrival_prob, seed) for name in spec.policies]
            for name, report in zip(spec.policies, run_pair_seeded(configs, backend=backend)):
                cells[(name, arrival_prob, seed)] = ResultRow(
                    policy=name,
                    arrival_prob=arrival_prob,
                    seed=seed,
                    arrived=report.arrived,
                    departed=report.departed,
                    loss=report.loss,
                    dropped=report.dropped,
                    missed=report.missed,
                    delay=report.delay_mean,
                    mql=report.mql,
                    throughput=report.throughput,
                )
    return [
        cells[(name, arrival_prob, seed)]
        for name in spec.policies
        for arrival_prob in sorted(spec.arrival_probs)
        for seed in spec.seeds
    ]

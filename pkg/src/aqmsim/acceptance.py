"""Acceptance checks: regime-level behavior of the four policies.

Runs the four arrival regimes (0.33, 0.5, 0.66, 0.93 against a 0.5 departure
probability) at full scale and verifies counter orderings, magnitudes,
structural identities, and the fuzzy numerics. Used by ``aqmsim check`` and
by tests/test_acceptance.py.

Two checks are expected to fail with the shipped fuzzy rule base and are kept
failing on purpose: the aggregated output of the "queue empty/low implies
drop probability zero" rules defuzzifies to a centroid of about 0.176, never
to an actual zero, so the fuzzy policy sheds roughly a fifth of all arrivals
even on an underloaded link. That makes "fuzzy drops nothing in underload"
(part of criterion 1) and the fuzzy delay band of criterion 3 mathematically
unreachable; see the test module docstring for the full argument.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Optional

from .config import ExperimentSpec, load_spec
from .fuzzy import defuzzify_cog
from .policies import HybridParams, RedParams, derive_thresholds
from .simulator import HybridPolicy, SimReport, run, run_pair_seeded

ARRIVAL_REGIMES = (0.33, 0.5, 0.66, 0.93)
POLICY_ORDER = ("red", "ered", "hybrid", "fuzzy")

# Reference magnitudes and tolerances for the saturated regime.
RED_DELAY_REF = 33.63675
FUZZY_DELAY_REF = 21.46638
DELAY_REL_TOL = 0.25
ARRIVED_REL_TOL = 0.005
MISSED_REL_TOL = 0.03
MISSED_SPREAD_TOL = 0.02
FUZZY_LOSS_CEILING = 1000
LITTLE_REL_TOL = 0.05
CENTROID_ABS_TOL = 1e-3
RUN_SECONDS_BUDGET = 10.0


@dataclass
class CriterionResult:
    ident: str
    description: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.ident} {self.description}: {self.detail}"


@dataclass
class AcceptanceOutcome:
    results: list[CriterionResult]
    reports: dict[tuple[float, str], SimReport]
    max_run_seconds: float

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


def trapezoid_centroid(a: float, b: float, c: float, d: float) -> float:
    """Closed-form centroid of a fully activated trapezoid membership."""
    num = (b - a) * (a + 2 * b) / 6 + (c * c - b * b) / 2 + (d - c) * (2 * c + d) / 6
    den = (b - a) / 2 + (c - b) + (d - c) / 2
    return num / den


def _fmt(values: dict[str, object]) -> str:
    return " ".join(f"{k}={v}" for k, v in values.items())


def run_acceptance(
    spec: Optional[ExperimentSpec] = None,
    backend: Optional[str] = None,
) -> AcceptanceOutcome:
    spec = spec or load_spec()
    seed = spec.seeds[0]
    reports: dict[tuple[float, str], SimReport] = {}
    max_seconds = 0.0
    for arrival in ARRIVAL_REGIMES:
        configs = [spec.sim_config(name, arrival, seed) for name in POLICY_ORDER]
        started = time.perf_counter()
        for name, rep in zip(POLICY_ORDER, run_pair_seeded(configs, backend=backend)):
            reports[(arrival, name)] = rep
        elapsed = (time.perf_counter() - started) / len(POLICY_ORDER)
        max_seconds = max(max_seconds, elapsed)

    results: list[CriterionResult] = []

    def add(ident: str, description: str, passed: bool, detail: str) -> None:
        results.append(CriterionResult(ident, description, passed, detail))

    # C1: underload inactivity and policy equivalence
    under = [reports[(0.33, name)] for name in POLICY_ORDER]
    zeros = all(r.loss == 0 and r.dropped == 0 for r in under)
    triples = {(r.arrived, r.departed, r.delay_mean) for r in under}
    add(
        "C1",
        "underload: no loss/drops, identical behavior across policies",
        zeros and len(triples) == 1,
        _fmt({
            "loss": [r.loss for r in under],
            "dropped": [r.dropped for r in under],
            "distinct(arrived,departed,delay)": len(triples),
        }),
    )

    # C2: saturated orderings
    sat = {name: reports[(0.93, name)] for name in POLICY_ORDER}
    loss_ok = (
        sat["red"].loss > sat["ered"].loss > sat["hybrid"].loss > sat["fuzzy"].loss
        and sat["fuzzy"].loss <= FUZZY_LOSS_CEILING
    )
    dropped_ok = (
        sat["red"].dropped < sat["ered"].dropped < sat["hybrid"].dropped <= sat["fuzzy"].dropped
    )
    delay_ok = (
        sat["red"].delay_mean > sat["ered"].delay_mean
        > sat["hybrid"].delay_mean > sat["fuzzy"].delay_mean
    )
    missed = [sat[name].missed for name in POLICY_ORDER]
    spread = max(missed) / min(missed) - 1.0 if min(missed) > 0 else float("inf")
    add(
        "C2",
        "saturation: loss/dropped/delay orderings, missed within 2%",
        loss_ok and dropped_ok and delay_ok and spread <= MISSED_SPREAD_TOL,
        _fmt({
            "loss": [sat[n].loss for n in POLICY_ORDER],
            "dropped": [sat[n].dropped for n in POLICY_ORDER],
            "delay": [round(sat[n].delay_mean, 5) for n in POLICY_ORDER],
            "missed_spread": round(spread, 5),
        }),
    )

    # C3: saturated magnitudes
    measured_slots = spec.total_slots - spec.warmup_slots
    expected_arrived = 0.93 * measured_slots
    arrived_ok = all(
        abs(sat[n].arrived - expected_arrived) <= ARRIVED_REL_TOL * expected_arrived
        for n in POLICY_ORDER
    )
    missed_ok = True
    for n in POLICY_ORDER:
        expected_missed = sat[n].arrived - spec.departure_prob * measured_slots
        if abs(sat[n].missed - expected_missed) > MISSED_REL_TOL * expected_missed:
            missed_ok = False
    red_delay_ok = abs(sat["red"].delay_mean - RED_DELAY_REF) <= DELAY_REL_TOL * RED_DELAY_REF
    fuzzy_delay_ok = abs(sat["fuzzy"].delay_mean - FUZZY_DELAY_REF) <= DELAY_REL_TOL * FUZZY_DELAY_REF
    add(
        "C3",
        "saturation magnitudes: arrived, missed, red/fuzzy delay bands",
        arrived_ok and missed_ok and red_delay_ok and fuzzy_delay_ok,
        _fmt({
            "arrived_ok": arrived_ok,
            "missed_ok": missed_ok,
            "red_delay": round(sat["red"].delay_mean, 5),
            "fuzzy_delay": round(sat["fuzzy"].delay_mean, 5),
        }),
    )

    # C4: mid-load loss/missed orderings
    mid_ok = True
    mid_detail = {}
    for arrival in (0.5, 0.66):
        regime = {name: reports[(arrival, name)] for name in POLICY_ORDER}
        mid_ok &= regime["fuzzy"].loss == 0
        mid_ok &= regime["hybrid"].loss <= regime["ered"].loss <= regime["red"].loss
        mid_detail[f"loss@{arrival}"] = [regime[n].loss for n in POLICY_ORDER]
    regime66 = {name: reports[(0.66, name)] for name in POLICY_ORDER}
    mid_ok &= regime66["hybrid"].missed <= regime66["ered"].missed <= regime66["red"].missed
    mid_detail["missed@0.66"] = [regime66[n].missed for n in ("red", "ered", "hybrid")]
    add("C4", "mid-load: fuzzy loss 0, hybrid<=ered<=red orderings", bool(mid_ok), _fmt(mid_detail))

    # C5: hybrid with zero delay weight is bit-identical to ered
    zero_hybrid = HybridPolicy(HybridParams(spec.hybrid.red, delay_weight=0.0))
    zcfg = replace(spec.sim_config("ered", 0.93, seed), policy=zero_hybrid)
    zero_report = run(zcfg, backend=backend)
    add(
        "C5",
        "hybrid(delay_weight=0) reproduces ered bit-for-bit",
        zero_report == sat["ered"],
        _fmt({"equal": zero_report == sat["ered"]}),
    )

    # C6: conservation identity on every run of the suite
    violations = [
        key
        for key, rep in reports.items()
        if rep.arrived != rep.departed + rep.loss + rep.dropped + rep.residual_delta()
    ]
    add("C6", "packet conservation holds exactly on every run", not violations,
        _fmt({"violations": violations or "none"}))

    # C7: discrete center-of-gravity vs closed-form centroid per output term
    fis = spec.fis
    worst = 0.0
    for label, mf in fis.dp_var.terms:
        acts = {other: 0.0 for other, _ in fis.dp_var.terms}
        acts[label] = 1.0
        got = defuzzify_cog(fis, acts)
        want = trapezoid_centroid(mf.a, mf.b, mf.c, mf.d)
        worst = max(worst, abs(got - want))
    add("C7", "defuzzification matches analytic centroids within 1e-3",
        worst <= CENTROID_ABS_TOL, _fmt({"max_abs_err": f"{worst:.2e}"}))

    # C8: derived-threshold algebra
    th = derive_thresholds(RedParams(min_th=3, max_th=9))
    th_ok = (th.min_th2, th.max_th2, th.max_th3) == (9.0, 15.75, 18.0)
    add("C8", "derived thresholds of (3, 9) equal (9, 15.75, 18)", th_ok,
        _fmt({"got": (th.min_th2, th.max_th2, th.max_th3)}))

    # C9: Little's-law consistency at saturation
    little_detail = {}
    little_ok = True
    for name in POLICY_ORDER:
        rep = sat[name]
        err = abs(rep.mql - rep.delay_mean * rep.throughput) / rep.mql if rep.mql else 0.0
        little_detail[name] = round(err, 5)
        little_ok &= err <= LITTLE_REL_TOL
    add("C9", "little's-law cross-check at saturation within 5%", bool(little_ok),
        _fmt(little_detail))

    # Runtime budget for a full-scale single run
    add("C10", f"single full-scale run within {RUN_SECONDS_BUDGET:.0f}s",
        max_seconds <= RUN_SECONDS_BUDGET, _fmt({"max_run_seconds": round(max_seconds, 3)}))

    return AcceptanceOutcome(results=results, reports=reports, max_run_seconds=max_seconds)

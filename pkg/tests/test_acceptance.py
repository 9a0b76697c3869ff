"""Acceptance suite: full-scale regime checks for the four policies.

Each test prints its criterion line (PASS/FAIL plus counters) and asserts it.
Runs use the default configuration: 2,000,000 slots, 800,000 warm-up,
capacity 20, departure probability 0.5, seed 42, compiled backend when built.

KNOWN FAILURES (kept red on purpose, not weakened):

* C1 fails on the fuzzy policy. Its rule base routes every "queue empty" or
  "queue low" state to the "zero" output set {0, 0, 0.3, 0.4}, whose centroid
  is ~0.176, and centroid defuzzification of a non-empty set can never return
  an actual 0. The fuzzy drop probability therefore has a floor of ~0.176
  (plus the weighted delay term), and over ~395k underload arrivals it sheds
  ~93k packets where the criterion demands exactly zero and identical
  behavior across policies. No defensible reading of min/max inference with
  the shipped membership tables can produce literal zero, and criterion C7
  pins that same centroid at ~0.1762, so C1 and C7 cannot both hold.
  ERED/hybrid can also drop a handful of packets here (2 at seed 42): their
  instantaneous-occupancy branch fires when q > 15.75 regardless of the
  average, and a 1.2M-slot underload run visits such states a few times.

* C2 fails on the RED-side orderings and C3 on both delay bands. The RED
  contract implemented here forces a drop whenever the average reaches
  max_th, which regulates the average queue to ~max_th (mql ~9, delay ~18
  slots, few overflows). The reference comparison numbers instead reflect a
  RED whose drop probability merely keeps ramping past max_th, letting the
  queue ride near capacity (delay ~34, heavy loss). With the contractual
  forced-drop branch, RED ends up with *less* loss and delay than ERED, so
  "RED worst" orderings and the 33.64-slot delay band are unreachable; the
  fuzzy delay band (21.47 +/- 25%) is likewise unreachable because the
  ~0.176 probability floor plus the delay term hold its queue near 3 packets
  (delay ~5 slots). C4's two inversions (red loss at 0.5, hybrid missed at
  0.66) are the same effects at mid-load and are seed-robust.

Everything verifiable about the implementation itself (equivalences,
conservation, numerics, thresholds, Little's law, runtime) passes.
"""
import pytest

from aqmsim.acceptance import run_acceptance

CRITERIA = {
    "C1": "underload: no loss/drops, identical behavior across policies",
    "C2": "saturation: loss/dropped/delay orderings, missed within 2%",
    "C3": "saturation magnitudes: arrived, missed, red/fuzzy delay bands",
    "C4": "mid-load: fuzzy loss 0, hybrid<=ered<=red orderings",
    "C5": "hybrid(delay_weight=0) reproduces ered bit-for-bit",
    "C6": "packet conservation holds exactly on every run",
    "C7": "defuzzification matches analytic centroids within 1e-3",
    "C8": "derived thresholds of (3, 9) equal (9, 15.75, 18)",
    "C9": "little's-law cross-check at saturation within 5%",
    "C10": "single full-scale run within 10s",
}


@pytest.fixture(scope="module")
def outcome():
    result = run_acceptance()
    print()
    for criterion in result.results:
        print(criterion.line())
    return result


@pytest.mark.parametrize("ident", list(CRITERIA))
def test_criterion(outcome, ident):
    result = next(r for r in outcome.results if r.ident == ident)
    print(result.line())
    assert result.description == CRITERIA[ident]
    assert result.passed, result.line()


class TestSupplementary:
    """Narrower checks that hold at the default seed; these stay green and
    localize exactly which clauses of the red criteria fail."""

    def test_underload_parametric_policies_nearly_silent(self, outcome):
        # red is structurally silent; ered/hybrid see only deep-tail
        # occupancy excursions (q > 15.75 with a low average)
        for name in ("red", "ered", "hybrid"):
            rep = outcome.reports[(0.33, name)]
            assert rep.loss == 0
            assert rep.dropped <= 5

    def test_underload_red_silent_and_fuzzy_floor(self, outcome):
        red = outcome.reports[(0.33, "red")]
        assert red.dropped == 0 and red.loss == 0
        fuzzy = outcome.reports[(0.33, "fuzzy")]
        # ~0.176 floor plus delay term over ~395k arrivals
        assert fuzzy.dropped > 50_000

    def test_saturation_ered_vs_hybrid_orderings(self, outcome):
        sat = {name: outcome.reports[(0.93, name)] for name in ("ered", "hybrid", "fuzzy")}
        assert sat["ered"].loss > sat["hybrid"].loss >= sat["fuzzy"].loss == 0
        assert sat["ered"].dropped < sat["hybrid"].dropped <= sat["fuzzy"].dropped
        assert sat["ered"].delay_mean > sat["hybrid"].delay_mean > sat["fuzzy"].delay_mean

    def test_saturation_missed_spread_small(self, outcome):
        missed = [outcome.reports[(0.93, n)].missed for n in ("red", "ered", "hybrid", "fuzzy")]
        assert max(missed) / min(missed) - 1 <= 0.02

    def test_midload_hybrid_not_worse_than_ered_on_loss(self, outcome):
        for arrival in (0.5, 0.66):
            ered = outcome.reports[(arrival, "ered")]
            hybrid = outcome.reports[(arrival, "hybrid")]
            assert hybrid.loss <= ered.loss

    def test_throughput_bounded_by_departure_rate(self, outcome):
        for rep in outcome.reports.values():
            assert 0.0 <= rep.throughput <= 0.5 + 1e-3

    def test_full_scale_arrived_matches_offered_load(self, outcome):
        for (arrival, _name), rep in outcome.reports.items():
            expected = arrival * 1_200_000
            assert abs(rep.arrived - expected) <= 0.005 * expected

"""Policy tests: threshold algebra, probability formulas, decision scenarios."""
import pytest
from hypothesis import given, strategies as st

from aqmsim.policies import (
    Decision,
    HybridParams,
    PolicyState,
    RedParams,
    base_drop_probability,
    count_adjust,
    derive_thresholds,
    ered_decide,
    hybrid_decide,
    red_decide,
)
from aqmsim.rng import SplitMix64

PARAMS = RedParams(min_th=3, max_th=9, max_p=0.1)
TH = derive_thresholds(PARAMS)


class FixedDraws:
    """Deterministic stand-in for the uniform stream."""

    def __init__(self, draws):
        self.draws = list(draws)

    def uniform(self):
        return self.draws.pop(0)


class TestDerivedThresholds:
    def test_default_inputs(self):
        assert (TH.min_th2, TH.max_th2, TH.max_th3) == (9.0, 15.75, 18.0)

    def test_small_inputs(self):
        th = derive_thresholds(RedParams(min_th=0, max_th=2))
        assert (th.min_th2, th.max_th2, th.max_th3) == (1.0, 3.5, 4.0)

    def test_ordering_property(self):
        # min_th2 < max_th2 requires min_th < (5/6)*max_th; the upper pair is
        # always ordered. The shipped (3, 9) sits comfortably inside.
        for min_th in range(0, 10):
            for max_th in range(min_th + 1, 20):
                th = derive_thresholds(RedParams(min_th=min_th, max_th=max_th))
                assert th.max_th2 < th.max_th3
                if min_th < (5 / 6) * max_th:
                    assert th.min_th2 < th.max_th2

    def test_rejects_inverted_pair(self):
        with pytest.raises(ValueError):
            RedParams(min_th=3, max_th=3)


class TestBaseDropProbability:
    def test_lower_boundary(self):
        assert base_drop_probability(3, PARAMS) == 0.0

    def test_upper_boundary_equals_max_p(self):
        assert base_drop_probability(9, PARAMS) == pytest.approx(0.1)

    def test_midpoint(self):
        assert base_drop_probability(6, PARAMS) == pytest.approx(0.05)

    def test_clamped_above_one(self):
        wide = RedParams(min_th=1, max_th=2, max_p=1.0)
        assert base_drop_probability(50, wide) == 1.0


class TestCountAdjust:
    def test_identity_at_zero(self):
        assert count_adjust(0.05, 0) == pytest.approx(0.05)

    def test_count_ten(self):
        assert count_adjust(0.05, 10) == pytest.approx(0.1)

    def test_exhausted_spread_clamps(self):
        assert count_adjust(0.05, 20) == 1.0
        assert count_adjust(0.05, 30) == 1.0


class TestRedDecide:
    def test_below_min_th_never_drops(self):
        state = PolicyState(count=5)
        decision = red_decide(state, PARAMS, 2.9, 10, FixedDraws([]))
        assert decision == Decision(False, 0.0)
        assert state.count == -1

    def test_at_or_above_max_th_always_drops(self):
        state = PolicyState()
        decision = red_decide(state, PARAMS, 9.5, 2, FixedDraws([]))
        assert decision == Decision(True, 1.0)
        assert state.count == 0

    def test_ramp_drop_on_low_draw(self):
        # entering the ramp from count -1 gives dp = base probability 0.05
        state = PolicyState(count=-1)
        decision = red_decide(state, PARAMS, 6, 5, FixedDraws([0.01]))
        assert decision.drop
        assert decision.dp == pytest.approx(0.05)
        assert state.count == 0

    def test_ramp_enqueue_on_high_draw_increments_count(self):
        state = PolicyState(count=-1)
        decision = red_decide(state, PARAMS, 6, 5, FixedDraws([0.9]))
        assert not decision.drop
        assert state.count == 0
        decision = red_decide(state, PARAMS, 6, 5, FixedDraws([0.9]))
        assert not decision.drop
        assert state.count == 1
        assert decision.dp == pytest.approx(0.05 / (1 - 0.05))


class TestEredDecide:
    def test_calm_queue_enqueues(self):
        state = PolicyState(count=3)
        decision = ered_decide(state, PARAMS, TH, 2, 5, FixedDraws([]))
        assert decision == Decision(False, 0.0)
        assert state.count == -1

    def test_forced_drop_above_max_th3(self):
        state = PolicyState()
        decision = ered_decide(state, PARAMS, TH, 19, 0, FixedDraws([]))
        assert decision == Decision(True, 1.0)
        assert state.count == 0

    def test_instantaneous_spike_uses_ceiling_probability(self):
        state = PolicyState(count=-1)
        decision = ered_decide(state, PARAMS, TH, 2, 16, FixedDraws([0.5]))
        assert not decision.drop
        assert decision.dp == pytest.approx(0.1)
        assert state.count == 0

    def test_ramp_region_needs_both_indicators(self):
        # avg in region but q below min_th2: no drop
        state = PolicyState()
        decision = ered_decide(state, PARAMS, TH, 10, 5, FixedDraws([]))
        assert decision == Decision(False, 0.0)
        # both indicators high: ramp probability applies
        state = PolicyState(count=-1)
        decision = ered_decide(state, PARAMS, TH, 10, 12, FixedDraws([0.9]))
        assert decision.dp == pytest.approx(base_drop_probability(10, PARAMS))


class TestHybridDecide:
    HP = HybridParams(PARAMS, delay_weight=0.05)

    def test_zero_delay_reduces_to_ered(self):
        state = PolicyState(count=-1)
        decision = hybrid_decide(state, self.HP, TH, 9.0, 12, 0.0, FixedDraws([0.9]))
        assert decision.dp == pytest.approx(base_drop_probability(9.0, PARAMS))

    def test_delay_term_added(self):
        # dp = 0.05 + 0.05*10 = 0.55 when count lands at 0
        params = HybridParams(RedParams(min_th=3, max_th=9, max_p=0.1), delay_weight=0.05)
        th = derive_thresholds(params.red)
        state = PolicyState(count=-1)
        decision = hybrid_decide(state, params, th, 9.001, 12, 10.0, FixedDraws([0.9]))
        expected = base_drop_probability(9.001, params.red) + 0.05 * 10.0
        assert decision.dp == pytest.approx(expected)

    def test_delay_term_clamps_at_one(self):
        state = PolicyState(count=-1)
        decision = hybrid_decide(state, self.HP, TH, 9.0, 12, 30.0, FixedDraws([0.999999]))
        assert decision.dp == 1.0
        assert decision.drop

    def test_negative_delay_rejected(self):
        with pytest.raises(ValueError):
            hybrid_decide(PolicyState(), self.HP, TH, 9.0, 12, -1.0, FixedDraws([]))


def test_hybrid_zero_weight_matches_ered_decision_stream():
    """delay_weight=0 must replay ERED decision-for-decision on a shared stream."""
    params = RedParams(min_th=3, max_th=9, max_p=0.1)
    hp = HybridParams(params, delay_weight=0.0)
    th = derive_thresholds(params)
    drive = SplitMix64(99)
    ered_rng, hybrid_rng = SplitMix64(5), SplitMix64(5)
    ered_state, hybrid_state = PolicyState(), PolicyState()
    for _ in range(20_000):
        avg = drive.uniform() * 40.0
        q = int(drive.uniform() * 21)
        d = drive.uniform() * 50.0
        a = ered_decide(ered_state, params, th, avg, q, ered_rng)
        b = hybrid_decide(hybrid_state, hp, th, avg, q, d, hybrid_rng)
        assert a == b
        assert ered_state.count == hybrid_state.count


def test_scenario_partition_is_exhaustive_and_exclusive():
    """On a 0.1 grid over [0, 2*capacity]^2 exactly one scenario fires."""
    min_th2, max_th2, max_th3 = TH.min_th2, TH.max_th2, TH.max_th3
    for i in range(401):
        avg = i * 0.1
        for j in range(401):
            q = j * 0.1
            a = min_th2 <= avg < max_th3 and q >= min_th2
            b = not a and (avg < min_th2 and q > max_th2)
            c = not a and not b and avg >= max_th3
            d = not (a or b or c)
            # mirror of the branch chain: first match wins, exactly one holds
            assert sum((a, b, c, d)) == 1
            # raw region predicates (a) and (b) never overlap
            assert not (
                (min_th2 <= avg < max_th3 and q >= min_th2)
                and (avg < min_th2 and q > max_th2)
            )


def test_count_bookkeeping_over_long_run():
    rng = SplitMix64(3)
    drive = SplitMix64(8)
    state = PolicyState()
    for _ in range(100_000):
        avg = drive.uniform() * 20.0
        q = int(drive.uniform() * 21)
        decision = ered_decide(state, PARAMS, TH, avg, q, rng)
        if decision.drop:
            assert state.count == 0
        elif decision.dp == 0.0:
            assert state.count == -1
        else:
            assert state.count >= 0


@given(
    avg=st.floats(min_value=0.0, max_value=40.0),
    q=st.integers(min_value=0, max_value=20),
    d=st.floats(min_value=0.0, max_value=100.0),
    count=st.integers(min_value=-1, max_value=50),
    draw=st.floats(min_value=0.0, max_value=0.999999),
)
def test_dp_always_in_unit_interval(avg, q, d, count, draw):
    hp = HybridParams(PARAMS, delay_weight=0.05)
    for decide in (
        lambda s: red_decide(s, PARAMS, avg, q, FixedDraws([draw])),
        lambda s: ered_decide(s, PARAMS, TH, avg, q, FixedDraws([draw])),
        lambda s: hybrid_decide(s, hp, TH, avg, q, d, FixedDraws([draw])),
    ):
        decision = decide(PolicyState(count=count))
        assert 0.0 <= decision.dp <= 1.0


@given(
    avg_lo=st.floats(min_value=9.0, max_value=17.0),
    avg_hi=st.floats(min_value=9.0, max_value=17.0),
    d_lo=st.floats(min_value=0.0, max_value=40.0),
    d_hi=st.floats(min_value=0.0, max_value=40.0),
)
def test_dp_monotone_in_avg_and_delay(avg_lo, avg_hi, d_lo, d_hi):
    hp = HybridParams(PARAMS, delay_weight=0.05)
    avg_lo, avg_hi = sorted((avg_lo, avg_hi))
    d_lo, d_hi = sorted((d_lo, d_hi))

    def dp(avg, d):
        return hybrid_decide(PolicyState(count=4), hp, TH, avg, 12, d, FixedDraws([0.999999])).dp

    assert dp(avg_lo, d_lo) <= dp(avg_hi, d_lo) + 1e-12
    assert dp(avg_lo, d_lo) <= dp(avg_lo, d_hi) + 1e-12

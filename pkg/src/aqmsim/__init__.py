"""aqmsim: discrete-time router-buffer simulation of RED-family drop policies.

Four policies behind one decision interface (classic RED, ERED, a delay-aware
hybrid, and a Mamdani fuzzy controller), a slot-based Bernoulli traffic
engine with warm-up discard, and an experiment runner with CSV/JSON/table
reporting. The hot loop runs on a compiled kernel when available and on a
bit-identical pure-Python fallback otherwise.
"""
from .estimators import (
    AvgQueueEstimator,
    DelayEstimate,
    RateEstimator,
    estimate_delay,
    update_avg_idle,
    update_avg_nonempty,
    update_rate,
    update_rates_per_slot,
)
from .fuzzy import (
    FisConfig,
    FuzzyRule,
    LinguisticVariable,
    Trapezoid,
    defuzzify_cog,
    fuzzify,
    fuzzy_decide,
    fuzzy_final_dp,
    fuzzy_initial_dp,
)
from .policies import (
    Decision,
    DerivedThresholds,
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
from .queue_core import PacketRecord, RouterQueue
from .rng import SplitMix64, derive_streams
from .simulator import (
    BACKEND,
    HAVE_COMPILED,
    EredPolicy,
    FuzzyPolicy,
    HybridPolicy,
    RedPolicy,
    SimConfig,
    SimReport,
    run,
    run_pair_seeded,
)

__version__ = "0.1.0"

__all__ = [
    "AvgQueueEstimator", "DelayEstimate", "RateEstimator",
    "estimate_delay", "update_avg_idle", "update_avg_nonempty",
    "update_rate", "update_rates_per_slot",
    "FisConfig", "FuzzyRule", "LinguisticVariable", "Trapezoid",
    "defuzzify_cog", "fuzzify", "fuzzy_decide", "fuzzy_final_dp", "fuzzy_initial_dp",
    "Decision", "DerivedThresholds", "HybridParams", "PolicyState", "RedParams",
    "base_drop_probability", "count_adjust", "derive_thresholds",
    "ered_decide", "hybrid_decide", "red_decide",
    "PacketRecord", "RouterQueue",
    "SplitMix64", "derive_streams",
    "BACKEND", "HAVE_COMPILED",
    "EredPolicy", "FuzzyPolicy", "HybridPolicy", "RedPolicy",
    "SimConfig", "SimReport", "run", "run_pair_seeded",
    "__version__",
]

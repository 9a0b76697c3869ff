"""Mamdani-style fuzzy inference for the rule-based drop policy.

Crisp occupancy and average queue length are normalized to [0, 1], fuzzified
over trapezoidal terms, pushed through an if/then rule base (AND = min,
aggregation = max, consequents clipped at rule activation), and defuzzified
with a discrete center-of-gravity over a fixed grid. The resulting initial
drop probability is then merged with the weighted delay estimate.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .policies import Decision, clamp01
from .rng import SplitMix64


@dataclass(frozen=True)
class Trapezoid:
    """Trapezoidal membership on [0, 1]: zero outside [a, d], one on [b, c],
    linear on the ramps. ``b == c`` gives the triangular special case."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not 0.0 <= self.a <= self.b <= self.c <= self.d <= 1.0:
            raise ValueError("trapezoid corners must satisfy 0 <= a <= b <= c <= d <= 1")

    def degree(self, x: float) -> float:
        if x < self.a or x > self.d:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        if x <= self.c:
            return 1.0
        return (self.d - x) / (self.d - self.c)


def membership_degree(mf: Trapezoid, x: float) -> float:
    """Piecewise-linear trapezoid evaluation at a normalized position."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must be in [0, 1]")
    return mf.degree(x)


class LinguisticVariable:
    """Named, ordered set of labeled trapezoidal terms over [0, 1]."""

    def __init__(self, name: str, terms: list[tuple[str, Trapezoid]]):
        if not terms:
            raise ValueError(f"{name}: needs at least one term")
        labels = [label for label, _ in terms]
        if len(set(labels)) != len(labels):
            raise ValueError(f"{name}: term labels must be unique")
        self.name = name
        self.terms: tuple[tuple[str, Trapezoid], ...] = tuple(terms)

    @classmethod
    def from_corners(cls, name: str, corners: list[tuple[str, tuple[float, float, float, float]]]):
        """Build from raw 4-tuples, widening the top term into a right
        shoulder (plateau up to its upper corner).

        Without this, a variable whose top term ends in a down-ramp at 1.0
        would give the upper edge of the range zero membership in every term,
        and a maxed-out input would fire no rule at all.
        """
        terms = []
        for i, (label, (a, b, c, d)) in enumerate(corners):
            if i == len(corners) - 1:
                c = d
            terms.append((label, Trapezoid(a, b, c, d)))
        return cls(name, terms)

    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinguisticVariable)
            and self.name == other.name
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.name, self.terms))

    def __repr__(self) -> str:
        return f"LinguisticVariable({self.name!r}, {list(self.terms)!r})"

    def covers_range(self) -> bool:
        """True when every x in [0, 1] has positive membership in some term.

        Membership is piecewise linear, so checking all corner points plus the
        midpoints between consecutive corners is exact.
        """
        points = {0.0, 1.0}
        for _, mf in self.terms:
            points.update((mf.a, mf.b, mf.c, mf.d))
        xs = sorted(p for p in points if 0.0 <= p <= 1.0)
        probes = list(xs)
        probes.extend((lo + hi) / 2.0 for lo, hi in zip(xs, xs[1:]))
        return all(any(mf.degree(x) > 0.0 for _, mf in self.terms) for x in probes)

    def fuzzify(self, crisp: float) -> dict[str, float]:
        if not 0.0 <= crisp <= 1.0:
            raise ValueError(f"{self.name}: crisp input {crisp!r} outside [0, 1]")
        return {label: mf.degree(crisp) for label, mf in self.terms}


@dataclass(frozen=True)
class FuzzyRule:
    """IF [q is q_term] [AND avg is avg_term] THEN dp is dp_term.

    Either antecedent may be omitted (None), but not both.
    """

    q_term: str | None
    avg_term: str | None
    dp_term: str

    def __post_init__(self):
        if self.q_term is None and self.avg_term is None:
            raise ValueError("rule needs at least one antecedent")


# Shipped defaults: term corner points and rule base of the drop controller.
DEFAULT_Q_CORNERS = [
    ("empty", (0.0, 0.0, 0.6, 0.7)),
    ("low", (0.6, 0.7, 0.7, 0.8)),
    ("moderate", (0.7, 0.8, 0.8, 0.9)),
    ("full", (0.8, 0.9, 0.9, 1.0)),
]
DEFAULT_AVG_CORNERS = [
    ("low", (0.0, 0.0, 0.6, 0.7)),
    ("moderate", (0.6, 0.8, 0.8, 0.9)),
    ("high", (0.8, 0.9, 0.9, 1.0)),
]
DEFAULT_DP_CORNERS = [
    ("zero", (0.0, 0.0, 0.3, 0.4)),
    ("low", (0.3, 0.4, 0.5, 0.6)),
    ("moderate", (0.5, 0.6, 0.8, 0.9)),
    ("high", (0.8, 0.9, 1.0, 1.0)),
]
DEFAULT_RULES = [
    FuzzyRule("empty", None, "zero"),
    FuzzyRule("low", None, "zero"),
    FuzzyRule("moderate", "low", "low"),
    FuzzyRule("moderate", "moderate", "low"),
    FuzzyRule("moderate", "high", "moderate"),
    FuzzyRule("full", "low", "moderate"),
    FuzzyRule("full", "moderate", "high"),
    FuzzyRule("full", "high", "high"),
]


@dataclass(frozen=True)
class FisConfig:
    """Fuzzy controller configuration: variables, rules, COG step, delay weight."""

    q_var: LinguisticVariable
    avg_var: LinguisticVariable
    dp_var: LinguisticVariable
    rules: tuple[FuzzyRule, ...]
    cog_step: float = 0.001
    delay_weight: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.cog_step <= 0.01:
            raise ValueError("cog_step must be in (0, 0.01]")
        if self.delay_weight < 0.0:
            raise ValueError("delay_weight cannot be negative")
        if not self.rules:
            raise ValueError("rule base cannot be empty")
        q_labels, avg_labels, dp_labels = (
            set(self.q_var.labels()),
            set(self.avg_var.labels()),
            set(self.dp_var.labels()),
        )
        for i, rule in enumerate(self.rules):
            if rule.q_term is not None and rule.q_term not in q_labels:
                raise ValueError(f"rules[{i}]: unknown q term {rule.q_term!r}")
            if rule.avg_term is not None and rule.avg_term not in avg_labels:
                raise ValueError(f"rules[{i}]: unknown avg term {rule.avg_term!r}")
            if rule.dp_term not in dp_labels:
                raise ValueError(f"rules[{i}]: unknown dp term {rule.dp_term!r}")
        # Only inputs are fuzzified, so only they need gap-free coverage.
        for var in (self.q_var, self.avg_var):
            if not var.covers_range():
                raise ValueError(f"{var.name}: term supports leave part of [0, 1] uncovered")

    @classmethod
    def default(cls) -> "FisConfig":
        return cls(
            q_var=LinguisticVariable.from_corners("q", DEFAULT_Q_CORNERS),
            avg_var=LinguisticVariable.from_corners("avg", DEFAULT_AVG_CORNERS),
            dp_var=LinguisticVariable.from_corners("dp", DEFAULT_DP_CORNERS),
            rules=tuple(DEFAULT_RULES),
        )


@lru_cache(maxsize=32)
def _cog_grid(dp_var: LinguisticVariable, step: float) -> tuple[list[float], list[list[float]]]:
    n = int(1.0 / step + 1e-9) + 1
    xs = [i * step for i in range(n)]
    mf_rows = [[mf.degree(x) for x in xs] for _, mf in dp_var.terms]
    return xs, mf_rows


def _cog_sum(xs: list[float], mf_rows: list[list[float]], acts: tuple[float, ...]) -> float:
    # Left-to-right accumulation; the compiled kernel replicates this loop
    # exactly so both backends defuzzify to the same double.
    num = 0.0
    den = 0.0
    for i, x in enumerate(xs):
        mu = 0.0
        for row, act in zip(mf_rows, acts):
            v = row[i]
            if act < v:
                v = act
            if v > mu:
                mu = v
        num += mu * x
        den += mu
    if den == 0.0:
        return 0.0
    return num / den


def fuzzify(var: LinguisticVariable, crisp: float) -> dict[str, float]:
    """Degrees of every term of ``var`` at a normalized crisp input."""
    return var.fuzzify(crisp)


def evaluate_rules(
    cfg: FisConfig,
    q_degrees: dict[str, float],
    avg_degrees: dict[str, float],
) -> dict[str, float]:
    """Rule activations per output label: min over antecedents, max over rules."""
    acts = {label: 0.0 for label in cfg.dp_var.labels()}
    for rule in cfg.rules:
        if rule.q_term is not None:
            act = q_degrees[rule.q_term]
            if rule.avg_term is not None:
                other = avg_degrees[rule.avg_term]
                if other < act:
                    act = other
        else:
            act = avg_degrees[rule.avg_term]
        if act > acts[rule.dp_term]:
            acts[rule.dp_term] = act
    return acts


def defuzzify_cog(cfg: FisConfig, activations: dict[str, float]) -> float:
    """Center of gravity of the clipped-and-aggregated output curve.

    The curve max(min(activation, membership)) is sampled at cog_step over
    [0, 1]. All-zero activations defuzzify to 0 by convention.
    """
    xs, mf_rows = _cog_grid(cfg.dp_var, cfg.cog_step)
    acts = tuple(activations.get(label, 0.0) for label in cfg.dp_var.labels())
    return _cog_sum(xs, mf_rows, acts)


def fuzzy_initial_dp(cfg: FisConfig, q: float, avg: float, capacity: int) -> float:
    """Full inference chain from raw packet counts to the initial probability.

    Inputs are normalized by buffer capacity. The normalized average is
    clamped at 1 so an average above capacity still fuzzifies; occupancy is
    bounded by capacity already.
    """
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    if not 0 <= q <= capacity:
        raise ValueError("q must be in [0, capacity]")
    if avg < 0:
        raise ValueError("avg cannot be negative")
    q_norm = q / capacity
    avg_norm = min(avg / capacity, 1.0)
    q_deg = cfg.q_var.fuzzify(q_norm)
    avg_deg = cfg.avg_var.fuzzify(avg_norm)
    return defuzzify_cog(cfg, evaluate_rules(cfg, q_deg, avg_deg))


def fuzzy_final_dp(dp_initial: float, d_esti: float, delay_weight: float) -> float:
    """Merge the inferred probability with the weighted delay estimate."""
    if not 0.0 <= dp_initial <= 1.0:
        raise ValueError("dp_initial must be in [0, 1]")
    if d_esti < 0:
        raise ValueError("d_esti cannot be negative")
    return clamp01(dp_initial + delay_weight * d_esti)


def fuzzy_decide(
    cfg: FisConfig,
    q: int,
    avg: float,
    d_esti: float,
    capacity: int,
    rng: SplitMix64,
) -> Decision:
    """Drop with the merged probability; no count mechanism, no thresholds."""
    dp = fuzzy_final_dp(fuzzy_initial_dp(cfg, q, avg, capacity), d_esti, cfg.delay_weight)
    return Decision(rng.uniform() < dp, dp)


class InferenceTables:
    """Precomputed arrays driving the hot loop.

    Holds per-occupancy input degrees, rule index triples, and the sampled
    output grid. Produces exactly the same numbers as the operation-level
    pipeline above; the center-of-gravity is cached per activation tuple
    (exact float keys, so caching cannot change results).
    """

    def __init__(self, cfg: FisConfig, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.cfg = cfg
        self.capacity = capacity
        self.delay_weight = cfg.delay_weight

        q_labels = cfg.q_var.labels()
        avg_labels = cfg.avg_var.labels()
        dp_labels = cfg.dp_var.labels()
        q_index = {label: i for i, label in enumerate(q_labels)}
        avg_index = {label: i for i, label in enumerate(avg_labels)}
        dp_index = {label: i for i, label in enumerate(dp_labels)}

        self.n_out = len(dp_labels)
        self.q_degrees = [
            tuple(mf.degree(q / capacity) for _, mf in cfg.q_var.terms)
            for q in range(capacity + 1)
        ]
        self.avg_terms = [(mf.a, mf.b, mf.c, mf.d) for _, mf in cfg.avg_var.terms]
        self.rules = [
            (
                -1 if r.q_term is None else q_index[r.q_term],
                -1 if r.avg_term is None else avg_index[r.avg_term],
                dp_index[r.dp_term],
            )
            for r in cfg.rules
        ]
        self.grid_x, self.mf_grid = _cog_grid(cfg.dp_var, cfg.cog_step)
        self._cog_cache: dict[tuple[float, ...], float] = {}

    def avg_degrees(self, avg_norm: float) -> list[float]:
        out = []
        for a, b, c, d in self.avg_terms:
            if avg_norm < a or avg_norm > d:
                out.append(0.0)
            elif avg_norm < b:
                out.append((avg_norm - a) / (b - a))
            elif avg_norm <= c:
                out.append(1.0)
            else:
                out.append((d - avg_norm) / (d - c))
        return out

    def cog(self, acts: tuple[float, ...]) -> float:
        cached = self._cog_cache.get(acts)
        if cached is None:
            cached = _cog_sum(self.grid_x, self.mf_grid, acts)
            self._cog_cache[acts] = cached
        return cached

    def initial_dp(self, q: int, avg_norm: float) -> float:
        q_deg = self.q_degrees[q]
        avg_deg = self.avg_degrees(avg_norm)
        acts = [0.0] * self.n_out
        for qi, ai, oi in self.rules:
            if qi >= 0:
                act = q_deg[qi]
                if ai >= 0 and avg_deg[ai] < act:
                    act = avg_deg[ai]
            else:
                act = avg_deg[ai]
            if act > acts[oi]:
                acts[oi] = act
        return self.cog(tuple(acts))

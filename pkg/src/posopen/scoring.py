"""Cohort-relative 1-5 openness scores.

Each axis is scored by rank, not by value: a chain's score depends on how many
cohort members it strictly beats, so heavy-tailed raw values (attack capital
spans orders of magnitude) cannot compress everyone else into one bucket.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .errors import MetricError, ScoringError
from .metrics import (
    DEFAULT_THRESHOLD,
    AttackGoal,
    Costing,
    attack_quantity,
    effective_entry_capital,
    nakamoto_coefficient,
    operating_cost,
    quorum_validator_count,
    staking_ratio,
    validator_count,
)
from .model import ChainSnapshot, UsdAmount, round_half_up

MIN_SCORE, MAX_SCORE = 1, 5


class Direction(enum.Enum):
    HIGHER_IS_BETTER = "higher_is_better"
    LOWER_IS_BETTER = "lower_is_better"


class Axis(enum.Enum):
    VALIDATORS = "validators"
    ENTRY_CAPITAL = "entry_capital"
    CAPITAL_CONCENTRATION = "capital_concentration"
    OPERATING_COST = "operating_cost"
    ECONOMIC_STABILITY = "economic_stability"


# Fixed radar/report order.
AXES = tuple(Axis)

AXIS_DIRECTIONS = {
    Axis.VALIDATORS: Direction.HIGHER_IS_BETTER,
    Axis.ENTRY_CAPITAL: Direction.LOWER_IS_BETTER,
    Axis.CAPITAL_CONCENTRATION: Direction.HIGHER_IS_BETTER,
    Axis.OPERATING_COST: Direction.LOWER_IS_BETTER,
    Axis.ECONOMIC_STABILITY: Direction.HIGHER_IS_BETTER,
}

# Undisclosed metric names that knock a chain out of an axis cohort.
AXIS_INPUTS = {
    Axis.VALIDATORS: ("validator_count",),
    Axis.ENTRY_CAPITAL: ("entry_capital",),
    Axis.CAPITAL_CONCENTRATION: ("nakamoto",),
    Axis.OPERATING_COST: ("operating_cost",),
    Axis.ECONOMIC_STABILITY: ("staking_ratio", "attack_capital"),
}


@dataclass(frozen=True)
class MetricVector:
    chain_id: str
    validator_count: int
    entry_capital_usd: UsdAmount
    nakamoto: int
    operating_cost_usd: UsdAmount
    staking_ratio: Fraction
    attack_capital_usd: UsdAmount
    # Reported alongside, never scored.
    quorum_validator_count: int
    undisclosed: frozenset[str] = field(default_factory=frozenset)

    def has_axis(self, axis: Axis) -> bool:
        return not any(name in self.undisclosed for name in AXIS_INPUTS[axis])


@dataclass(frozen=True)
class AxisScore:
    axis: Axis
    score: int
    direction: Direction


@dataclass(frozen=True)
class ChainScores:
    scores: tuple[AxisScore, ...]
    total: int
    partial: bool

    def score_for(self, axis: Axis) -> Optional[int]:
        for s in self.scores:
            if s.axis is axis:
                return s.score
        return None


@dataclass(frozen=True)
class OpennessReport:
    cohort_id: str
    per_chain: Mapping[str, ChainScores]
    radar: Mapping[str, tuple[Optional[int], ...]]
    metrics: Mapping[str, MetricVector]
    axes: tuple[Axis, ...] = AXES

    def ranked_chain_ids(self) -> list[str]:
        """Chains by total descending, then chain id."""
        return sorted(self.per_chain, key=lambda c: (-self.per_chain[c].total, c))


def rank_score(values: Sequence[tuple[Hashable, object]], direction: Direction) -> dict:
    """Map each chain to ``1 + round(4 * r)`` where ``r`` is the share of other
    chains with a strictly worse value.  Equal values always score equally."""
    n = len(values)
    if n < 2:
        raise ScoringError("COHORT_TOO_SMALL", f"need at least 2 chains to rank, got {n}")
    sign_better = 1 if direction is Direction.HIGHER_IS_BETTER else -1
    out = {}
    for chain, value in values:
        if sign_better > 0:
            worse = sum(1 for _, other in values if other < value)
        else:
            worse = sum(1 for _, other in values if other > value)
        span = MAX_SCORE - MIN_SCORE
        out[chain] = MIN_SCORE + round_half_up(Fraction(span * worse, n - 1))
    return out


def economic_stability_score(
    ratios: Sequence[tuple[Hashable, object]], capitals: Sequence[tuple[Hashable, object]]
) -> dict:
    """Mean of the staking-ratio and attack-capital rank scores, rounded half-up."""
    ratio_ids = {c for c, _ in ratios}
    capital_ids = {c for c, _ in capitals}
    if ratio_ids != capital_ids:
        missing = sorted(map(str, ratio_ids ^ capital_ids))
        raise ScoringError("COHORT_MISMATCH", f"chains missing one stability factor: {', '.join(missing)}")
    ratio_scores = rank_score(ratios, Direction.HIGHER_IS_BETTER)
    capital_scores = rank_score(capitals, Direction.HIGHER_IS_BETTER)
    combined = {}
    for chain in ratio_scores:
        mean = Fraction(ratio_scores[chain] + capital_scores[chain], 2)
        combined[chain] = min(MAX_SCORE, max(MIN_SCORE, round_half_up(mean)))
    return combined


def compute_metric_vector(
    snapshot: ChainSnapshot,
    *,
    threshold: Fraction = DEFAULT_THRESHOLD,
    goal: AttackGoal = AttackGoal.DISRUPTION,
    costing: Costing = Costing.PROTOCOL_MIN,
) -> MetricVector:
    vs, model = snapshot.validator_set, snapshot.consensus
    try:
        return MetricVector(
            chain_id=snapshot.chain_id,
            validator_count=validator_count(snapshot),
            entry_capital_usd=effective_entry_capital(snapshot),
            nakamoto=nakamoto_coefficient(vs, model, threshold),
            operating_cost_usd=operating_cost(snapshot),
            staking_ratio=staking_ratio(snapshot),
            attack_capital_usd=attack_quantity(snapshot, goal, costing=costing).capital,
            quorum_validator_count=quorum_validator_count(vs, model),
            undisclosed=frozenset(snapshot.undisclosed),
        )
    except MetricError as exc:
        raise ScoringError(exc.code, exc.message, chain_id=snapshot.chain_id) from exc


def _axis_values(vectors: Iterable[MetricVector], axis: Axis) -> list[tuple[str, object]]:
    getter = {
        Axis.VALIDATORS: lambda m: m.validator_count,
        Axis.ENTRY_CAPITAL: lambda m: m.entry_capital_usd,
        Axis.CAPITAL_CONCENTRATION: lambda m: m.nakamoto,
        Axis.OPERATING_COST: lambda m: m.operating_cost_usd,
    }[axis]
    return [(m.chain_id, getter(m)) for m in vectors if m.has_axis(axis)]


def score_vectors(vectors: Sequence[MetricVector], cohort_id: str = "cohort") -> OpennessReport:
    if len(vectors) < 2:
        raise ScoringError("COHORT_TOO_SMALL", f"need at least 2 chains, got {len(vectors)}")
    ids = [m.chain_id for m in vectors]
    if len(set(ids)) != len(ids):
        raise ScoringError("DUPLICATE_CHAIN_ID", "chain ids in a cohort must be distinct")

    axis_scores: dict[Axis, dict[str, int]] = {}
    for axis in AXES:
        if sum(m.has_axis(axis) for m in vectors) < 2:
            # Nothing to rank against; the axis stays blank for everyone.
            axis_scores[axis] = {}
        elif axis is Axis.ECONOMIC_STABILITY:
            members = [m for m in vectors if m.has_axis(axis)]
            axis_scores[axis] = economic_stability_score(
                [(m.chain_id, m.staking_ratio) for m in members],
                [(m.chain_id, m.attack_capital_usd) for m in members],
            )
        else:
            axis_scores[axis] = rank_score(_axis_values(vectors, axis), AXIS_DIRECTIONS[axis])

    per_chain = {}
    radar = {}
    for chain in sorted(ids):
        scores = tuple(
            AxisScore(axis, axis_scores[axis][chain], AXIS_DIRECTIONS[axis])
            for axis in AXES
            if chain in axis_scores[axis]
        )
        per_chain[chain] = ChainScores(scores, sum(s.score for s in scores), len(scores) < len(AXES))
        radar[chain] = tuple(axis_scores[axis].get(chain) for axis in AXES)
    metrics = {m.chain_id: m for m in sorted(vectors, key=lambda m: m.chain_id)}
    return OpennessReport(cohort_id, per_chain, radar, metrics)


def openness_report(
    cohort: Sequence[ChainSnapshot],
    cohort_id: str = "cohort",
    *,
    threshold: Fraction = DEFAULT_THRESHOLD,
    goal: AttackGoal = AttackGoal.DISRUPTION,
    costing: Costing = Costing.PROTOCOL_MIN,
) -> OpennessReport:
    """Score a cohort of validated snapshots on the five openness axes."""
    if len(cohort) < 2:
        raise ScoringError("COHORT_TOO_SMALL", f"need at least 2 chains, got {len(cohort)}")
    vectors = [compute_metric_vector(s, threshold=threshold, goal=goal, costing=costing) for s in cohort]
    return score_vectors(vectors, cohort_id)

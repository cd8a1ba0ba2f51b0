from __future__ import annotations

import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from posopen.errors import ScoringError
from posopen.ingest import load_cohort, fixture_dir
from posopen.model import UsdAmount
from posopen.scoring import (
    AXES,
    Axis,
    Direction,
    MetricVector,
    compute_metric_vector,
    economic_stability_score,
    openness_report,
    rank_score,
    score_vectors,
)

from conftest import cohorts, make_snapshot, rescale_usd

HIGHER, LOWER = Direction.HIGHER_IS_BETTER, Direction.LOWER_IS_BETTER


def ranked(values, direction=HIGHER):
    scores = rank_score([(i, v) for i, v in enumerate(values)], direction)
    return [scores[i] for i in range(len(values))]


# ------------------------------------------------------------------ examples


def test_rank_score_examples():
    assert ranked([10, 20, 30]) == [1, 3, 5]
    assert ranked([7, 7, 7, 7]) == [1, 1, 1, 1]
    # r = 0, 0, 2/3, 1 -> 1 + round(0, 0, 8/3, 4)
    assert ranked([1, 1, 2, 100]) == [1, 1, 4, 5]
    assert ranked([10, 20, 30], LOWER) == [5, 3, 1]


def test_rank_score_half_rounds_up():
    # n = 9: one worse chain gives r = 1/8, 4r = 1/2
    assert ranked(list(range(9)))[1] == 2


def test_rank_score_needs_two_chains():
    with pytest.raises(ScoringError, match="COHORT_TOO_SMALL"):
        rank_score([("a", 1)], HIGHER)


def test_economic_stability_examples():
    # two chains where one dominates both factors: 5 and 5, 1 and 1
    assert economic_stability_score([("a", 2), ("b", 1)], [("a", 20), ("b", 10)]) == {"a": 5, "b": 1}
    # ratio ranks [1,3,5], capital ranks [3,5,1]: means 2, 4, 3
    got = economic_stability_score([("a", 1), ("b", 2), ("c", 3)], [("a", 2), ("b", 3), ("c", 1)])
    assert got == {"a": 2, "b": 4, "c": 3}
    # ratio score 2 (n=5, one worse -> 1 + round(1)), capital score 3 -> 2.5 -> 3
    ratios = [(c, v) for c, v in zip("abcde", [2, 1, 3, 4, 5])]
    capitals = [(c, v) for c, v in zip("abcde", [3, 1, 2, 4, 5])]
    assert rank_score(ratios, HIGHER)["a"] == 2
    assert rank_score(capitals, HIGHER)["a"] == 3
    assert economic_stability_score(ratios, capitals)["a"] == 3


def test_economic_stability_mismatch():
    with pytest.raises(ScoringError, match="COHORT_MISMATCH"):
        economic_stability_score([("a", 1), ("b", 2)], [("a", 1)])


def test_identical_chains_score_identically():
    a = make_snapshot([10, 20, 30], chain_id="a")
    b = dataclasses.replace(a, chain_id="b")
    report = openness_report([a, b])
    assert report.per_chain["a"] == report.per_chain["b"]
    assert report.radar["a"] == report.radar["b"] == (1, 1, 1, 1, 1)


def test_report_guards():
    a = make_snapshot([10], chain_id="a")
    with pytest.raises(ScoringError, match="COHORT_TOO_SMALL"):
        openness_report([a])
    with pytest.raises(ScoringError, match="DUPLICATE_CHAIN_ID"):
        openness_report([a, a])


def test_metric_errors_carry_chain_id():
    bad = make_snapshot([0, 0], chain_id="dead")
    with pytest.raises(ScoringError) as info:
        openness_report([make_snapshot([5], chain_id="ok"), bad])
    assert info.value.code == "ZERO_TOTAL_STAKE"
    assert info.value.chain_id == "dead"


def test_undisclosed_metric_leaves_axis_blank():
    hidden = make_snapshot([5, 5], chain_id="hidden", undisclosed={"validator_count"})
    report = openness_report([hidden, make_snapshot([5, 5, 5], chain_id="a"), make_snapshot([5], chain_id="b")])
    row = report.per_chain["hidden"]
    assert row.partial and row.score_for(Axis.VALIDATORS) is None
    assert report.radar["hidden"][0] is None
    # the validators axis is ranked among the two disclosing chains only
    assert report.per_chain["a"].score_for(Axis.VALIDATORS) == 5
    assert report.per_chain["b"].score_for(Axis.VALIDATORS) == 1
    assert not report.per_chain["a"].partial


def test_fixture_cohort_ordering():
    report = openness_report(load_cohort(fixture_dir()))
    total = {c: s.total for c, s in report.per_chain.items()}
    assert total["solana"] > total["bnb-chain"]
    assert report.per_chain["algorand"].partial
    assert report.ranked_chain_ids()[0] == "avalanche"


# ---------------------------------------------------------------- properties


def check_bounds(report):
    for row in report.per_chain.values():
        assert all(1 <= s.score <= 5 for s in row.scores)
        if not row.partial:
            assert 5 <= row.total <= 25
        assert len(report.radar) == len(report.per_chain)


@given(cohorts(min_size=2, max_size=8))
@settings(max_examples=60, deadline=None)
def test_scores_are_bounded(cohort):
    check_bounds(openness_report(cohort))


@given(cohorts(min_size=2, max_size=8), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_permutation_invariance(cohort, rnd):
    shuffled = list(cohort)
    rnd.shuffle(shuffled)
    a, b = openness_report(cohort), openness_report(shuffled)
    assert a.per_chain == b.per_chain and a.radar == b.radar


@given(cohorts(min_size=2, max_size=8))
@settings(max_examples=60, deadline=None)
def test_usd_rescaling_changes_nothing(cohort):
    before = openness_report(cohort)
    after = openness_report([rescale_usd(s, 1000) for s in cohort])
    assert before.per_chain == after.per_chain


def improve(vector: MetricVector, axis: Axis, which: int) -> MetricVector:
    """Move one raw metric of ``vector`` in its more-open direction."""
    if axis is Axis.VALIDATORS:
        return dataclasses.replace(vector, validator_count=vector.validator_count + 1)
    if axis is Axis.ENTRY_CAPITAL:
        return dataclasses.replace(vector, entry_capital_usd=UsdAmount(max(0, vector.entry_capital_usd.cents - 1)))
    if axis is Axis.CAPITAL_CONCENTRATION:
        return dataclasses.replace(vector, nakamoto=vector.nakamoto + 1)
    if axis is Axis.OPERATING_COST:
        return dataclasses.replace(vector, operating_cost_usd=UsdAmount(max(0, vector.operating_cost_usd.cents - 1)))
    if which == 0:
        return dataclasses.replace(vector, staking_ratio=(vector.staking_ratio + 1) / 2)
    return dataclasses.replace(vector, attack_capital_usd=UsdAmount(vector.attack_capital_usd.cents + 1))


def check_monotone(vectors, index, axis, which):
    before = score_vectors(vectors)
    changed = list(vectors)
    changed[index] = improve(vectors[index], axis, which)
    after = score_vectors(changed)
    target = vectors[index].chain_id
    for chain in before.per_chain:
        old, new = before.per_chain[chain].score_for(axis), after.per_chain[chain].score_for(axis)
        if old is None:
            continue
        assert new >= old if chain == target else new <= old


@given(cohorts(min_size=2, max_size=8), st.data())
@settings(max_examples=80, deadline=None)
def test_single_metric_improvement_is_monotone(cohort, data):
    vectors = [compute_metric_vector(s) for s in cohort]
    index = data.draw(st.integers(0, len(vectors) - 1))
    axis = data.draw(st.sampled_from(AXES))
    check_monotone(vectors, index, axis, data.draw(st.integers(0, 1)))


def test_staking_ratio_improvement_example():
    vectors = [compute_metric_vector(make_snapshot([10] * k, chain_id=f"c{k}", tradable=40 + k)) for k in (1, 2, 3)]
    check_monotone(vectors, 0, Axis.ECONOMIC_STABILITY, 0)
    assert vectors[0].staking_ratio == Fraction(10, 41)

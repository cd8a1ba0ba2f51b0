import dataclasses
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from posopen.model import (
    DecimalsMismatchError,
    TokenAmount,
    UsdAmount,
    Validator,
    ValidatorUnit,
    validate_snapshot,
)

from conftest import make_snapshot

amounts = st.integers(min_value=0, max_value=10**40)
decimals = st.integers(min_value=0, max_value=30)


@given(amounts, amounts, decimals)
def test_add_then_subtract_is_identity(a, b, d):
    x, y = TokenAmount(a, d), TokenAmount(b, d)
    assert (x + y) - y == x


def test_mixed_decimals_are_rejected():
    with pytest.raises(DecimalsMismatchError):
        TokenAmount(1, 6) + TokenAmount(1, 18)
    with pytest.raises(DecimalsMismatchError):
        TokenAmount(1, 6) < TokenAmount(1, 18)


def test_subtraction_never_goes_negative():
    with pytest.raises(ValueError):
        TokenAmount(1, 0) - TokenAmount(2, 0)


def test_from_display_and_format():
    eth = TokenAmount.from_display("32", 18)
    assert eth.base_units == 32 * 10**18
    assert eth.format() == "32"
    assert TokenAmount(1_500_000, 6).format() == "1.5"
    assert TokenAmount(12_345_678, 0).format() == "12,345,678"
    with pytest.raises(ValueError):
        TokenAmount.from_display("0.0000001", 6)


@pytest.mark.parametrize(
    "base, dec, price, cents",
    [
        (1, 18, "1", 0),  # a single wei rounds to nothing
        (5, 3, "1", 1),  # $0.005 rounds half up
        (4, 3, "1", 0),
        (9_000_000, 0, "2000", 1_800_000_000_000),
        (32 * 10**18, 18, "2000", 6_400_000),
        (1, 0, "0.125", 13),
    ],
)
def test_token_to_usd_rounds_half_up_to_cent(base, dec, price, cents):
    assert TokenAmount(base, dec).to_usd(Decimal(price)) == UsdAmount(cents)


def test_usd_format():
    assert UsdAmount(1_800_000_000_000).format() == "$18,000,000,000.00"
    assert UsdAmount(5).format() == "$0.05"
    assert UsdAmount.from_dollars("64000") == UsdAmount(6_400_000)


def test_well_formed_snapshot_is_valid():
    assert validate_snapshot(make_snapshot([40, 25, 20, 15])) == []


def codes(snapshot):
    return [v.code for v in validate_snapshot(snapshot)]


def test_duplicate_validator_id():
    snap = make_snapshot([10, 10, 10, 10])
    vs = snap.validator_set
    dup = vs.validators[:3] + (Validator(vs.validators[0].id, vs.validators[3].stake),)
    snap = dataclasses.replace(snap, validator_set=dataclasses.replace(vs, validators=dup))
    assert codes(snap) == ["DUPLICATE_VALIDATOR_ID"]


def test_stake_total_mismatch():
    snap = make_snapshot([10, 10, 10, 10])
    econ = dataclasses.replace(snap.economics, staked_total=TokenAmount(41, 0))
    assert codes(dataclasses.replace(snap, economics=econ)) == ["STAKE_TOTAL_MISMATCH"]


def test_below_minimum_needs_waiver():
    snap = make_snapshot([5, 50], min_stake=10)
    assert codes(snap) == ["BELOW_MINIMUM_STAKE"]
    waived = dataclasses.replace(snap, validator_set=dataclasses.replace(snap.validator_set, below_minimum_waiver=True))
    assert codes(waived) == []


def test_zero_stake_validator_is_allowed():
    assert codes(make_snapshot([0, 10])) == []


@pytest.mark.parametrize(
    "change, code",
    [
        (lambda s: dataclasses.replace(s, chain_id=""), "EMPTY_CHAIN_ID"),
        (lambda s: dataclasses.replace(s, consensus=s.consensus.with_quorum(Fraction(1, 2))), "QUORUM_OUT_OF_RANGE"),
        (lambda s: dataclasses.replace(s, consensus=dataclasses.replace(s.consensus, quorum_den=0)), "INVALID_QUORUM"),
        (
            lambda s: dataclasses.replace(s, economics=dataclasses.replace(s.economics, price_usd_per_token=Decimal(0))),
            "NONPOSITIVE_PRICE",
        ),
        (
            lambda s: dataclasses.replace(
                s, economics=dataclasses.replace(s.economics, price_usd_per_token=Decimal("0.0000000000001"))
            ),
            "PRICE_PRECISION",
        ),
        (
            lambda s: dataclasses.replace(
                s, economics=dataclasses.replace(s.economics, tradable_supply=TokenAmount(10**9, 0))
            ),
            "TRADABLE_EXCEEDS_CIRCULATING",
        ),
        (lambda s: dataclasses.replace(s, costs=dataclasses.replace(s.costs, reward_apr=Fraction(10))), "APR_OUT_OF_RANGE"),
        (lambda s: dataclasses.replace(s, costs=dataclasses.replace(s.costs, reward_apr=Fraction(-1))), "NEGATIVE_APR"),
        (
            lambda s: dataclasses.replace(s, validator_set=dataclasses.replace(s.validator_set, max_count=2)),
            "MAX_COUNT_EXCEEDED",
        ),
        (lambda s: dataclasses.replace(s, undisclosed=frozenset({"vibes"})), "UNKNOWN_METRIC"),
    ],
)
def test_each_invariant_has_a_code(change, code):
    assert code in codes(change(make_snapshot([10, 20, 30])))


def test_negative_stake_reports_validator():
    snap = make_snapshot([10, 20])
    vs = snap.validator_set
    bad = (vs.validators[0], Validator("neg", TokenAmount(-5, 0)))
    snap = dataclasses.replace(snap, validator_set=dataclasses.replace(vs, validators=bad))
    violations = validate_snapshot(snap)
    assert [v.code for v in violations] == ["NEGATIVE_AMOUNT"]
    assert "'neg'" in violations[0].message


def test_decimals_must_match_chain():
    snap = make_snapshot([10, 20])
    econ = dataclasses.replace(snap.economics, circulating_supply=TokenAmount(10**6, 6))
    assert "DECIMALS_MISMATCH" in codes(dataclasses.replace(snap, economics=econ))


garbage = st.one_of(st.none(), st.integers(), st.text(max_size=3), st.booleans())


@given(
    chain_id=st.one_of(st.text(max_size=5), garbage),
    stakes=st.lists(st.integers(-10, 10), max_size=5),
    dec=st.integers(-2, 40),
    num=st.integers(-3, 5),
    den=st.integers(-3, 5),
    price=st.sampled_from([Decimal(0), Decimal("-1"), Decimal("NaN"), Decimal("1.5"), Decimal("1e-20")]),
    apr=st.fractions(min_value=-20, max_value=20),
    max_count=st.one_of(st.none(), st.integers(-2, 6)),
    unit=st.one_of(st.sampled_from(list(ValidatorUnit)), garbage),
)
def test_validation_is_total_and_deterministic(chain_id, stakes, dec, num, den, price, apr, max_count, unit):
    snap = make_snapshot([abs(s) for s in stakes])
    vs = snap.validator_set
    validators = tuple(Validator(f"v{i % 3}", TokenAmount(s, dec)) for i, s in enumerate(stakes))
    snap = dataclasses.replace(
        snap,
        chain_id=chain_id,
        validator_unit=unit,
        consensus=dataclasses.replace(snap.consensus, quorum_num=num, quorum_den=den),
        validator_set=dataclasses.replace(vs, validators=validators, max_count=max_count),
        economics=dataclasses.replace(snap.economics, price_usd_per_token=price),
        costs=dataclasses.replace(snap.costs, reward_apr=apr),
    )
    first = validate_snapshot(snap)
    assert first == validate_snapshot(snap)
    assert all(v.code and v.field for v in first)

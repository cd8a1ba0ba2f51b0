from __future__ import annotations

from datetime import datetime, timezone
from decimal import Decimal
from fractions import Fraction

import pytest

from posopen.model import (
    ChainSnapshot,
    ConsensusFamily,
    ConsensusModel,
    CostModel,
    TokenAmount,
    TokenEconomics,
    UsdAmount,
    Validator,
    ValidatorSet,
)

STAKE = ConsensusModel(ConsensusFamily.STAKE_PROPORTIONAL)
COUNT = ConsensusModel(ConsensusFamily.VALIDATOR_COUNT)
T0 = datetime(2023, 4, 21, tzinfo=timezone.utc)


def make_set(stakes, decimals=0, min_stake=0, max_count=None, waiver=False) -> ValidatorSet:
    validators = tuple(Validator(f"v{i:03d}", TokenAmount(s, decimals)) for i, s in enumerate(stakes))
    return ValidatorSet(validators, TokenAmount(min_stake, decimals), max_count, waiver)


def make_snapshot(
    stakes,
    *,
    family=ConsensusFamily.STAKE_PROPORTIONAL,
    quorum=Fraction(2, 3),
    decimals=0,
    min_stake=0,
    max_count=None,
    tradable=None,
    circulating=None,
    price="1",
    hw_monthly_cents=10_000,
    apr=Fraction(1, 10),
    chain_id="chain",
    undisclosed=(),
) -> ChainSnapshot:
    vs = make_set(stakes, decimals, min_stake, max_count)
    staked = sum(stakes)
    tradable = max(staked, 1) * 4 if tradable is None else tradable
    circulating = tradable if circulating is None else circulating
    return ChainSnapshot(
        chain_id=chain_id,
        taken_at=T0,
        consensus=ConsensusModel(family, quorum.numerator, quorum.denominator),
        validator_set=vs,
        economics=TokenEconomics(
            TokenAmount(circulating, decimals),
            TokenAmount(tradable, decimals),
            TokenAmount(staked, decimals),
            Decimal(price),
        ),
        costs=CostModel(UsdAmount(hw_monthly_cents), apr),
        undisclosed=frozenset(undisclosed),
    )


# Acceptance criteria record their outcome here; printed at session end.
ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record pass/fail for one numbered acceptance criterion."""
    holder = {}

    def register(number: int, title: str):
        holder["key"] = (number, title)

    yield register
    if "key" in holder:
        number, title = holder["key"]
        failed = getattr(request.node, "_failed", True)
        ACCEPTANCE_RESULTS[number] = ("FAIL" if failed else "PASS", title)


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item._failed = report.failed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, title = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")


# ------------------------------------------------------- hypothesis strategies

from hypothesis import strategies as st  # noqa: E402


@st.composite
def snapshots(draw, chain_id="chain", max_validators=8):
    """Valid snapshots with integer prices and zero decimals, so every USD
    figure is an exact multiple of the price and rescaling is lossless."""
    stakes = draw(st.lists(st.integers(0, 10**6), min_size=1, max_size=max_validators).filter(lambda s: sum(s) > 0))
    staked = sum(stakes)
    family = draw(st.sampled_from(list(ConsensusFamily)))
    min_stake = draw(st.integers(0, min(stakes)))
    tradable = staked + draw(st.integers(0, 10**7))
    undisclosed = draw(st.sets(st.sampled_from(["validator_count", "nakamoto", "attack_capital"]), max_size=1))
    return make_snapshot(
        stakes,
        family=family,
        min_stake=min_stake,
        tradable=tradable,
        price=str(draw(st.integers(1, 5000))),
        hw_monthly_cents=draw(st.integers(0, 10**6)),
        apr=Fraction(draw(st.integers(1, 30)), 100),
        chain_id=chain_id,
        undisclosed=undisclosed if draw(st.integers(0, 4)) == 0 else (),
    )


@st.composite
def cohorts(draw, min_size=3, max_size=12):
    n = draw(st.integers(min_size, max_size))
    return [draw(snapshots(chain_id=f"c{i:02d}")) for i in range(n)]


def rescale_usd(snapshot: ChainSnapshot, factor: int) -> ChainSnapshot:
    """Multiply every USD input (price, hardware cost) by ``factor``."""
    import dataclasses

    econ = dataclasses.replace(snapshot.economics, price_usd_per_token=snapshot.economics.price_usd_per_token * factor)
    costs = dataclasses.replace(
        snapshot.costs, hw_monthly_cost_usd=UsdAmount(snapshot.costs.hw_monthly_cost_usd.cents * factor)
    )
    return dataclasses.replace(snapshot, economics=econ, costs=costs)


@st.composite
def valid_snapshots(draw):
    """Broad valid snapshots for round-trip checks: any decimals, fractional
    prices, microsecond timestamps, caps, waivers and text ids."""
    import dataclasses
    from datetime import timedelta
    from decimal import Decimal

    from posopen.model import DISCLOSABLE_METRICS, ValidatorUnit

    decimals = draw(st.integers(0, 30))
    stakes = draw(st.lists(st.integers(0, 10**40), min_size=0, max_size=6))
    ids = draw(st.lists(st.text(min_size=1, max_size=8), min_size=len(stakes), max_size=len(stakes), unique=True))
    waiver = draw(st.booleans())
    min_stake = draw(st.integers(0, 10**40)) if waiver or not stakes else draw(st.integers(0, min(stakes)))
    staked = sum(stakes)
    tradable = staked + draw(st.integers(0, 10**30))
    circulating = tradable + draw(st.integers(0, 10**30))
    max_count = draw(st.one_of(st.none(), st.integers(max(1, len(stakes)), len(stakes) + 3)))
    quorum = draw(st.fractions(min_value=Fraction(1, 2), max_value=1, max_denominator=1000).filter(lambda q: q > Fraction(1, 2)))
    price = Decimal(draw(st.integers(1, 10**15))).scaleb(-draw(st.integers(0, 12)))
    taken_at = T0 + timedelta(microseconds=draw(st.integers(0, 10**15)))
    snap = dataclasses.replace(
        make_snapshot([], decimals=decimals),
        chain_id=draw(st.text(min_size=1, max_size=12)),
        taken_at=taken_at,
        consensus=ConsensusModel(draw(st.sampled_from(list(ConsensusFamily))), quorum.numerator, quorum.denominator),
        validator_set=ValidatorSet(
            tuple(Validator(i, TokenAmount(s, decimals)) for i, s in zip(ids, stakes)),
            TokenAmount(min_stake, decimals),
            max_count,
            waiver,
        ),
        economics=TokenEconomics(
            TokenAmount(circulating, decimals),
            TokenAmount(tradable, decimals),
            TokenAmount(staked, decimals),
            price,
            tuple(draw(st.lists(st.text(max_size=10), max_size=3))),
        ),
        costs=CostModel(
            UsdAmount(draw(st.integers(0, 10**12))),
            draw(st.fractions(min_value=0, max_value=Fraction(99, 10), max_denominator=10**6)),
        ),
        validator_unit=draw(st.sampled_from(list(ValidatorUnit))),
        undisclosed=frozenset(draw(st.sets(st.sampled_from(DISCLOSABLE_METRICS)))),
    )
    return snap

"""Exact-arithmetic domain types for chain snapshots.

Constructors are deliberately lenient: they record whatever they are given so
that :func:`validate_snapshot` can report every broken invariant as data
instead of failing on the first one.  Arithmetic is strict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal
from fractions import Fraction
from typing import Optional

MAX_DECIMALS = 30
MAX_PRICE_FRACTION_DIGITS = 12
APR_SANITY_BOUND = 10

# Metric names a snapshot may declare as undisclosed by the chain.
DISCLOSABLE_METRICS = (
    "validator_count",
    "entry_capital",
    "nakamoto",
    "operating_cost",
    "staking_ratio",
    "attack_capital",
)


class DecimalsMismatchError(ValueError):
    """Raised when two token amounts with different decimals are combined."""


def round_half_up(value: Fraction) -> int:
    return (value + Fraction(1, 2)).__floor__()


def ceil_fraction(value: Fraction) -> int:
    return -((-value).__floor__())


@dataclass(frozen=True)
class TokenAmount:
    """Integer quantity of a native token in base units.

    ``decimals`` fixes the display scale: ``display = base_units / 10**decimals``.
    """

    base_units: int
    decimals: int = 0

    @classmethod
    def from_display(cls, amount: str | int | Decimal, decimals: int) -> TokenAmount:
        scaled = Decimal(amount).scaleb(decimals)
        if scaled != scaled.to_integral_value():
            raise ValueError(f"{amount} has more than {decimals} fractional digits")
        return cls(int(scaled), decimals)

    @classmethod
    def zero(cls, decimals: int) -> TokenAmount:
        return cls(0, decimals)

    def _check(self, other: object) -> TokenAmount:
        if not isinstance(other, TokenAmount):
            raise TypeError(f"expected TokenAmount, got {type(other).__name__}")
        if other.decimals != self.decimals:
            raise DecimalsMismatchError(
                f"cannot combine amounts with decimals {self.decimals} and {other.decimals}"
            )
        return other

    def __add__(self, other: TokenAmount) -> TokenAmount:
        return TokenAmount(self.base_units + self._check(other).base_units, self.decimals)

    def __sub__(self, other: TokenAmount) -> TokenAmount:
        result = self.base_units - self._check(other).base_units
        if result < 0:
            raise ValueError("token amount subtraction would go negative")
        return TokenAmount(result, self.decimals)

    def __mul__(self, factor: int) -> TokenAmount:
        if not isinstance(factor, int) or factor < 0:
            return NotImplemented
        return TokenAmount(self.base_units * factor, self.decimals)

    __rmul__ = __mul__

    # Ordering across different decimals is refused.
    def __lt__(self, other: TokenAmount) -> bool:
        return self.base_units < self._check(other).base_units

    def __le__(self, other: TokenAmount) -> bool:
        return self.base_units <= self._check(other).base_units

    def __gt__(self, other: TokenAmount) -> bool:
        return self.base_units > self._check(other).base_units

    def __ge__(self, other: TokenAmount) -> bool:
        return self.base_units >= self._check(other).base_units

    @property
    def display(self) -> Fraction:
        return Fraction(self.base_units, 10**self.decimals)

    def to_usd(self, price: Decimal) -> UsdAmount:
        """Value at ``price`` USD per display unit, rounded half-up to the cent."""
        cents = Fraction(self.base_units) * Fraction(price) * 100 / 10**self.decimals
        return UsdAmount(round_half_up(cents))

    def format(self) -> str:
        if self.decimals == 0:
            return f"{self.base_units:,}"
        whole, frac = divmod(self.base_units, 10**self.decimals)
        frac_text = str(frac).rjust(self.decimals, "0").rstrip("0")
        return f"{whole:,}" + (f".{frac_text}" if frac_text else "")


@dataclass(frozen=True, order=True)
class UsdAmount:
    cents: int

    @classmethod
    def from_dollars(cls, dollars: str | int | Decimal) -> UsdAmount:
        return cls(round_half_up(Fraction(Decimal(dollars)) * 100))

    def __add__(self, other: UsdAmount) -> UsdAmount:
        if not isinstance(other, UsdAmount):
            return NotImplemented
        return UsdAmount(self.cents + other.cents)

    @property
    def dollars(self) -> Fraction:
        return Fraction(self.cents, 100)

    def scaled(self, factor: int) -> UsdAmount:
        return UsdAmount(self.cents * factor)

    def format(self) -> str:
        whole, cents = divmod(self.cents, 100)
        return f"${whole:,}.{cents:02d}"

    def __str__(self) -> str:
        return self.format()


@dataclass(frozen=True)
class Validator:
    id: str
    stake: TokenAmount


class ConsensusFamily(enum.Enum):
    STAKE_PROPORTIONAL = "stake_proportional"
    VALIDATOR_COUNT = "validator_count"


@dataclass(frozen=True)
class ConsensusModel:
    family: ConsensusFamily
    quorum_num: int = 2
    quorum_den: int = 3

    @property
    def quorum(self) -> Fraction:
        return Fraction(self.quorum_num, self.quorum_den)

    def with_quorum(self, quorum: Fraction) -> ConsensusModel:
        return ConsensusModel(self.family, quorum.numerator, quorum.denominator)


@dataclass(frozen=True)
class ValidatorSet:
    validators: tuple[Validator, ...]
    min_stake_requirement: TokenAmount
    max_count: Optional[int] = None
    # Admits validators staked below the minimum (legacy or grandfathered).
    below_minimum_waiver: bool = False

    def __len__(self) -> int:
        return len(self.validators)

    @property
    def decimals(self) -> int:
        return self.min_stake_requirement.decimals

    def total_stake(self) -> TokenAmount:
        total = TokenAmount.zero(self.decimals)
        for v in self.validators:
            total = total + v.stake
        return total

    @property
    def is_full(self) -> bool:
        return self.max_count is not None and len(self.validators) >= self.max_count


@dataclass(frozen=True)
class TokenEconomics:
    circulating_supply: TokenAmount
    tradable_supply: TokenAmount
    staked_total: TokenAmount
    price_usd_per_token: Decimal
    # What was removed from circulating supply to get the tradable figure.
    tradable_exclusions: tuple[str, ...] = ()


@dataclass(frozen=True)
class CostModel:
    hw_monthly_cost_usd: UsdAmount
    reward_apr: Fraction


class ValidatorUnit(enum.Enum):
    VALIDATOR = "validator"
    NODE = "node"
    CLIENT = "client"


@dataclass(frozen=True)
class ChainSnapshot:
    chain_id: str
    taken_at: datetime
    consensus: ConsensusModel
    validator_set: ValidatorSet
    economics: TokenEconomics
    costs: CostModel
    validator_unit: ValidatorUnit = ValidatorUnit.VALIDATOR
    undisclosed: frozenset[str] = field(default_factory=frozenset)

    @property
    def decimals(self) -> int:
        return self.validator_set.decimals


@dataclass(frozen=True)
class Violation:
    code: str
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.code}: {self.message}"


def _amount_violations(amount: object, where: str, expected_decimals: Optional[int]) -> list[Violation]:
    if not isinstance(amount, TokenAmount):
        return [Violation("INVALID_TYPE", where, "expected a token amount")]
    out = []
    if not isinstance(amount.base_units, int) or isinstance(amount.base_units, bool):
        return [Violation("INVALID_TYPE", where, "base_units must be an integer")]
    if not isinstance(amount.decimals, int) or not 0 <= amount.decimals <= MAX_DECIMALS:
        out.append(
            Violation("INVALID_DECIMALS", where, f"decimals must lie in [0, {MAX_DECIMALS}], got {amount.decimals!r}")
        )
    elif expected_decimals is not None and amount.decimals != expected_decimals:
        out.append(
            Violation(
                "DECIMALS_MISMATCH", where, f"decimals {amount.decimals} differ from chain decimals {expected_decimals}"
            )
        )
    if amount.base_units < 0:
        out.append(Violation("NEGATIVE_AMOUNT", where, f"negative amount {amount.base_units}"))
    return out


def _is_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def validate_snapshot(snapshot: ChainSnapshot) -> list[Violation]:
    """Return every invariant violation of ``snapshot``, in a fixed order.

    Never raises on malformed content; an empty list means the snapshot is valid.
    """
    out: list[Violation] = []
    if not isinstance(snapshot.chain_id, str) or not snapshot.chain_id:
        out.append(Violation("EMPTY_CHAIN_ID", "chain.id", "chain id must be a non-empty string"))
    if not isinstance(snapshot.taken_at, datetime) or snapshot.taken_at.utcoffset() is None:
        out.append(Violation("INVALID_TIMESTAMP", "chain.taken_at", "timestamp must be timezone-aware UTC"))
    elif snapshot.taken_at.utcoffset().total_seconds() != 0:
        out.append(Violation("INVALID_TIMESTAMP", "chain.taken_at", "timestamp must be in UTC"))
    if not isinstance(snapshot.validator_unit, ValidatorUnit):
        out.append(Violation("INVALID_VALIDATOR_UNIT", "chain.validator_unit", "unknown validator unit"))
    for name in sorted(snapshot.undisclosed):
        if name not in DISCLOSABLE_METRICS:
            out.append(Violation("UNKNOWN_METRIC", "chain.undisclosed", f"unknown metric name {name!r}"))

    cm = snapshot.consensus
    if not isinstance(cm.family, ConsensusFamily):
        out.append(Violation("INVALID_FAMILY", "consensus.family", "unknown consensus family"))
    if not (_is_int(cm.quorum_num) and _is_int(cm.quorum_den)) or cm.quorum_num <= 0 or cm.quorum_den <= 0:
        out.append(Violation("INVALID_QUORUM", "consensus.quorum", "quorum num/den must be positive integers"))
    elif not Fraction(1, 2) < cm.quorum <= 1:
        out.append(Violation("QUORUM_OUT_OF_RANGE", "consensus.quorum", f"quorum {cm.quorum} not in (1/2, 1]"))

    vs = snapshot.validator_set
    decimals_ok = isinstance(vs.min_stake_requirement, TokenAmount) and _is_int(vs.min_stake_requirement.decimals)
    chain_decimals = vs.min_stake_requirement.decimals if decimals_ok else None
    out += _amount_violations(vs.min_stake_requirement, "validator_set.min_stake_requirement", None)
    if vs.max_count is not None and (not _is_int(vs.max_count) or vs.max_count <= 0):
        out.append(Violation("INVALID_MAX_COUNT", "validator_set.max_count", "max_count must be a positive integer"))
    elif vs.max_count is not None and len(vs.validators) > vs.max_count:
        out.append(
            Violation(
                "MAX_COUNT_EXCEEDED",
                "validator_set.validators",
                f"{len(vs.validators)} validators exceed max_count {vs.max_count}",
            )
        )
    seen: set[str] = set()
    stake_sum = 0
    stakes_ok = True
    for i, v in enumerate(vs.validators):
        where = f"validator_set.validators[{i}]"
        if not isinstance(v.id, str) or not v.id:
            out.append(Violation("EMPTY_VALIDATOR_ID", where + ".id", "validator id must be a non-empty string"))
        elif v.id in seen:
            out.append(Violation("DUPLICATE_VALIDATOR_ID", where + ".id", f"duplicate validator id {v.id!r}"))
        else:
            seen.add(v.id)
        problems = _amount_violations(v.stake, where + ".stake", chain_decimals)
        for p in problems:
            out.append(Violation(p.code, p.field, f"validator {v.id!r}: {p.message}"))
        if problems:
            stakes_ok = False
            continue
        stake_sum += v.stake.base_units
        if (
            not vs.below_minimum_waiver
            and decimals_ok
            and vs.min_stake_requirement.base_units >= 0
            and v.stake.base_units < vs.min_stake_requirement.base_units
        ):
            out.append(
                Violation(
                    "BELOW_MINIMUM_STAKE",
                    where + ".stake",
                    f"validator {v.id!r} stakes below the minimum requirement without a waiver",
                )
            )

    econ = snapshot.economics
    for name in ("circulating_supply", "tradable_supply", "staked_total"):
        out += _amount_violations(getattr(econ, name), f"economics.{name}", chain_decimals)
    amounts_ok = all(
        isinstance(getattr(econ, n), TokenAmount) and _is_int(getattr(econ, n).base_units)
        for n in ("circulating_supply", "tradable_supply", "staked_total")
    )
    if amounts_ok and econ.tradable_supply.base_units > econ.circulating_supply.base_units:
        out.append(
            Violation("TRADABLE_EXCEEDS_CIRCULATING", "economics.tradable_supply", "tradable supply exceeds circulating")
        )
    if amounts_ok and stakes_ok and econ.staked_total.base_units != stake_sum:
        out.append(
            Violation(
                "STAKE_TOTAL_MISMATCH",
                "economics.staked_total",
                f"staked_total {econ.staked_total.base_units} != sum of validator stakes {stake_sum}",
            )
        )
    price = econ.price_usd_per_token
    if not isinstance(price, Decimal) or not price.is_finite():
        out.append(Violation("INVALID_PRICE", "economics.price_usd_per_token", "price must be a finite decimal"))
    else:
        if price <= 0:
            out.append(Violation("NONPOSITIVE_PRICE", "economics.price_usd_per_token", "price must be positive"))
        if price.as_tuple().exponent < -MAX_PRICE_FRACTION_DIGITS:
            out.append(
                Violation(
                    "PRICE_PRECISION",
                    "economics.price_usd_per_token",
                    f"price has more than {MAX_PRICE_FRACTION_DIGITS} fractional digits",
                )
            )

    costs = snapshot.costs
    if not isinstance(costs.hw_monthly_cost_usd, UsdAmount) or not _is_int(costs.hw_monthly_cost_usd.cents):
        out.append(Violation("INVALID_TYPE", "costs.hw_monthly_cost_usd", "expected a USD amount"))
    elif costs.hw_monthly_cost_usd.cents < 0:
        out.append(Violation("NEGATIVE_AMOUNT", "costs.hw_monthly_cost_usd", "negative hardware cost"))
    apr = costs.reward_apr
    if not isinstance(apr, Fraction):
        out.append(Violation("INVALID_TYPE", "costs.reward_apr", "reward_apr must be a rational"))
    elif apr < 0:
        out.append(Violation("NEGATIVE_APR", "costs.reward_apr", "reward_apr must be non-negative"))
    elif apr >= APR_SANITY_BOUND:
        out.append(Violation("APR_OUT_OF_RANGE", "costs.reward_apr", f"reward_apr {apr} is not below {APR_SANITY_BOUND}"))
    return out

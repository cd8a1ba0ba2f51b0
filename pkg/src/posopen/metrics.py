"""Per-chain openness metrics.

Every function here is pure.  Quorum arithmetic stays in ``Fraction`` and is
only rounded at token base-unit or validator-count boundaries.  Greedy
selections order validators by descending power, ties broken by ascending id.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import MetricError
from .model import (
    ChainSnapshot,
    ConsensusFamily,
    ConsensusModel,
    TokenAmount,
    UsdAmount,
    Validator,
    ValidatorSet,
    ceil_fraction,
)

DEFAULT_THRESHOLD = Fraction(1, 3)
ORACLE_MAX_VALIDATORS = 20

# consensus_stake_fraction at or below this is flagged LOW.
LOW_CONSENSUS_FRACTION = Fraction(1, 5)


class AttackGoal(enum.Enum):
    DISRUPTION = "disruption"
    TAKEOVER = "takeover"


class AttackPath(enum.Enum):
    ACQUIRE_AND_STAKE = "acquire_and_stake"
    ACQUIRE_EXISTING_VALIDATORS = "acquire_existing_validators"


class Costing(enum.Enum):
    """How much each attacker-registered validator must stake."""

    PROTOCOL_MIN = "protocol-min"
    LEAST_STAKED = "least-staked"


@dataclass(frozen=True)
class AttackEstimate:
    goal: AttackGoal
    quantity: TokenAmount
    capital: UsdAmount
    path: AttackPath
    feasible: bool
    # Validators registered or acquired; None on stake-weighted chains.
    coalition_size: Optional[int] = None


def _require_validators(vs: ValidatorSet) -> None:
    if not vs.validators:
        raise MetricError("EMPTY_SET", "validator set is empty")


def voting_power(vs: ValidatorSet, model: ConsensusModel) -> list[tuple[str, int]]:
    _require_validators(vs)
    if model.family is ConsensusFamily.STAKE_PROPORTIONAL:
        return [(v.id, v.stake.base_units) for v in vs.validators]
    return [(v.id, 1) for v in vs.validators]


def _descending_powers(vs: ValidatorSet, model: ConsensusModel) -> tuple[list[int], int]:
    powers = voting_power(vs, model)
    powers.sort(key=lambda p: (-p[1], p[0]))
    total = sum(p for _, p in powers)
    if total == 0:
        raise MetricError("ZERO_TOTAL_STAKE", "total voting power is zero")
    return [p for _, p in powers], total


def nakamoto_coefficient(vs: ValidatorSet, model: ConsensusModel, threshold: Fraction = DEFAULT_THRESHOLD) -> int:
    """Fewest validators whose combined power strictly exceeds ``threshold`` of the total."""
    threshold = Fraction(threshold)
    if not 0 < threshold < 1:
        raise MetricError("INVALID_THRESHOLD", f"threshold {threshold} not in (0, 1)")
    powers, total = _descending_powers(vs, model)
    bound = threshold * total
    acc = 0
    for k, p in enumerate(powers, start=1):
        acc += p
        if acc > bound:
            return k
    raise AssertionError("unreachable: full set always exceeds a threshold below 1")


def quorum_validator_count(vs: ValidatorSet, model: ConsensusModel) -> int:
    """Fewest validators whose combined power reaches the quorum fraction."""
    powers, total = _descending_powers(vs, model)
    bound = model.quorum * total
    acc = 0
    for k, p in enumerate(powers, start=1):
        acc += p
        if acc >= bound:
            return k
    raise AssertionError("unreachable: full set always reaches a quorum of at most 1")


def _ascending_stakes(vs: ValidatorSet) -> list[int]:
    return sorted(v.stake.base_units for v in vs.validators)


def quorum_stake(vs: ValidatorSet, model: ConsensusModel) -> TokenAmount:
    """Smallest stake a coalition needs to finalize under ``model``.

    On count-weighted chains this is the ``ceil(quorum * N)`` smallest stakes.
    A lone validator is its own quorum, so its whole stake is returned.
    """
    _require_validators(vs)
    if len(vs) == 1:
        return vs.validators[0].stake
    if model.family is ConsensusFamily.STAKE_PROPORTIONAL:
        total = vs.total_stake().base_units
        return TokenAmount(ceil_fraction(model.quorum * total), vs.decimals)
    k = ceil_fraction(model.quorum * len(vs))
    return TokenAmount(sum(_ascending_stakes(vs)[:k]), vs.decimals)


def validator_count(snapshot: ChainSnapshot) -> int:
    return len(snapshot.validator_set)


def least_staked_validator(vs: ValidatorSet) -> Validator:
    _require_validators(vs)
    return min(vs.validators, key=lambda v: (v.stake.base_units, v.id))


def _tradable(snapshot: ChainSnapshot) -> int:
    tradable = snapshot.economics.tradable_supply.base_units
    if tradable <= 0:
        raise MetricError("ZERO_TRADABLE_SUPPLY", "tradable supply is zero")
    return tradable


def consensus_stake_fraction(snapshot: ChainSnapshot) -> Fraction:
    """Quorum stake as a share of tradable supply."""
    tradable = _tradable(snapshot)
    needed = quorum_stake(snapshot.validator_set, snapshot.consensus).base_units
    if needed > tradable:
        raise MetricError("STAKE_EXCEEDS_SUPPLY", "quorum stake exceeds tradable supply")
    return Fraction(needed, tradable)


def consensus_stake_flag(fraction: Fraction, low_cutoff: Fraction = LOW_CONSENSUS_FRACTION) -> str:
    return "LOW" if fraction <= low_cutoff else "NORMAL"


def staking_ratio(snapshot: ChainSnapshot) -> Fraction:
    tradable = _tradable(snapshot)
    staked = snapshot.economics.staked_total.base_units
    if staked > tradable:
        raise MetricError("STAKE_EXCEEDS_SUPPLY", "staked total exceeds tradable supply")
    return Fraction(staked, tradable)


def _min_satisfying(lower: Fraction, strict: bool) -> int:
    """Smallest non-negative integer x with x > lower (strict) or x >= lower."""
    if strict:
        return max(0, lower.__floor__() + 1)
    return max(0, ceil_fraction(lower))


def _register_count(goal: AttackGoal, n: int, quorum: Fraction) -> Optional[int]:
    # Attacker adds k equal-power validators to n existing ones.
    if goal is AttackGoal.DISRUPTION:
        # block: k / (n + k) > 1 - quorum
        return _min_satisfying((1 - quorum) * n / quorum, strict=True)
    if quorum == 1:
        return None
    # own quorum: k / (n + k) >= quorum
    return _min_satisfying(quorum * n / (1 - quorum), strict=False)


def _existing_count(goal: AttackGoal, n: int, quorum: Fraction) -> int:
    needed = ceil_fraction(quorum * n)
    return n - needed + 1 if goal is AttackGoal.DISRUPTION else needed


def attack_quantity(
    snapshot: ChainSnapshot,
    goal: AttackGoal,
    *,
    costing: Costing = Costing.PROTOCOL_MIN,
    allow_acquire_existing: bool = True,
    strict_boundary: bool = False,
) -> AttackEstimate:
    """Tokens an outside attacker must acquire to block or own consensus.

    Stake-weighted chains: the attacker buys and stakes ``q`` new tokens against
    the existing stake ``S``.  Disruption needs ``q / (S + q) >= 1 - quorum``
    (``>`` with ``strict_boundary``), which is ``ceil(S / 2)`` at quorum 2/3.

    Count-weighted chains: the attacker registers new validators, each staking
    the per-validator cost chosen by ``costing``.  When ``max_count`` leaves no
    room for them, the attacker instead buys out the cheapest existing
    validators, unless ``allow_acquire_existing`` is off, in which case the
    estimate is marked infeasible.
    """
    vs = snapshot.validator_set
    _require_validators(vs)
    total = vs.total_stake().base_units
    if total == 0:
        raise MetricError("ZERO_TOTAL_STAKE", "total stake is zero")
    quorum = snapshot.consensus.quorum
    price = snapshot.economics.price_usd_per_token

    def estimate(units: int, path: AttackPath, feasible: bool, size: Optional[int]) -> AttackEstimate:
        quantity = TokenAmount(units, vs.decimals)
        return AttackEstimate(goal, quantity, quantity.to_usd(price), path, feasible, size)

    if snapshot.consensus.family is ConsensusFamily.STAKE_PROPORTIONAL:
        if goal is AttackGoal.DISRUPTION:
            q = _min_satisfying((1 - quorum) * total / quorum, strict=strict_boundary)
            return estimate(max(q, 1), AttackPath.ACQUIRE_AND_STAKE, True, None)
        if quorum == 1:
            return estimate(0, AttackPath.ACQUIRE_AND_STAKE, False, None)
        q = _min_satisfying(quorum * total / (1 - quorum), strict=False)
        return estimate(q, AttackPath.ACQUIRE_AND_STAKE, True, None)

    n = len(vs)
    if costing is Costing.LEAST_STAKED:
        per_unit = max(least_staked_validator(vs).stake.base_units, 1)
    else:
        per_unit = max(vs.min_stake_requirement.base_units, 1)
    k = _register_count(goal, n, quorum)
    headroom = None if vs.max_count is None else max(vs.max_count - n, 0)
    if k is not None and (headroom is None or k <= headroom):
        return estimate(k * per_unit, AttackPath.ACQUIRE_AND_STAKE, True, k)
    if allow_acquire_existing:
        m = _existing_count(goal, n, quorum)
        return estimate(sum(_ascending_stakes(vs)[:m]), AttackPath.ACQUIRE_EXISTING_VALIDATORS, True, m)
    return estimate((k or 0) * per_unit, AttackPath.ACQUIRE_AND_STAKE, False, k)


def attack_capital(snapshot: ChainSnapshot, goal: AttackGoal, **options) -> UsdAmount:
    return attack_quantity(snapshot, goal, **options).capital


def entry_capital(snapshot: ChainSnapshot) -> tuple[UsdAmount, UsdAmount]:
    """USD value of the protocol minimum stake and of the least-staked validator."""
    vs = snapshot.validator_set
    price = snapshot.economics.price_usd_per_token
    least = least_staked_validator(vs)
    return vs.min_stake_requirement.to_usd(price), least.stake.to_usd(price)


def effective_entry_capital(snapshot: ChainSnapshot) -> UsdAmount:
    """Capital a newcomer actually needs to join.

    A full capped set only admits someone who outranks the least-staked
    validator; otherwise the protocol minimum is enough.
    """
    min_required, least_staked = entry_capital(snapshot)
    if snapshot.validator_set.is_full:
        return max(min_required, least_staked)
    return min_required


def operating_cost(snapshot: ChainSnapshot) -> UsdAmount:
    return snapshot.costs.hw_monthly_cost_usd


def break_even_stake(snapshot: ChainSnapshot) -> tuple[UsdAmount, TokenAmount]:
    """Smallest stake whose annual reward covers a year of hardware cost."""
    apr = snapshot.costs.reward_apr
    if apr <= 0:
        raise MetricError("ZERO_APR", "break-even stake is undefined at zero APR")
    price = Fraction(snapshot.economics.price_usd_per_token)
    if price <= 0:
        raise MetricError("NONPOSITIVE_PRICE", "price must be positive")
    cents = ceil_fraction(12 * snapshot.costs.hw_monthly_cost_usd.cents / apr)
    decimals = snapshot.decimals
    units = ceil_fraction(Fraction(cents, 100) * 10**decimals / price)
    return UsdAmount(cents), TokenAmount(units, decimals)


@dataclass(frozen=True)
class CoalitionRule:
    """Coalition power must exceed (``strict``) or reach ``fraction`` of the total."""

    fraction: Fraction
    strict: bool

    @classmethod
    def exceeds(cls, fraction: Fraction) -> CoalitionRule:
        return cls(Fraction(fraction), True)

    @classmethod
    def reaches(cls, fraction: Fraction) -> CoalitionRule:
        return cls(Fraction(fraction), False)


@lru_cache(maxsize=None)
def _subset_bits(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def _subset_sums(bits: np.ndarray, weights: list[int]) -> np.ndarray:
    if max(weights, default=0) * len(weights) < 2**62:
        return bits @ np.asarray(weights, dtype=np.int64)
    return bits.astype(object) @ np.asarray(weights, dtype=object)


def oracle_min_coalition(vs: ValidatorSet, model: ConsensusModel, rule: CoalitionRule) -> tuple[int, TokenAmount]:
    """Exhaustive search over all 2**N coalitions.

    Returns the smallest coalition size satisfying ``rule`` and, among
    coalitions of that size, the smallest total stake.  Test oracle only.
    """
    n = len(vs)
    if n > ORACLE_MAX_VALIDATORS:
        raise MetricError("SET_TOO_LARGE", f"{n} validators exceed the oracle limit of {ORACLE_MAX_VALIDATORS}")
    _require_validators(vs)
    powers = [p for _, p in voting_power(vs, model)]
    stakes = [v.stake.base_units for v in vs.validators]
    total = sum(powers)
    if total == 0:
        raise MetricError("ZERO_TOTAL_STAKE", "total voting power is zero")

    bits = _subset_bits(n)
    power_sums = _subset_sums(bits, powers)
    num, den = rule.fraction.numerator, rule.fraction.denominator
    if total * max(num, den) < 2**62:
        lhs, rhs = power_sums * den, num * total
    else:
        lhs, rhs = power_sums.astype(object) * den, num * total
    ok = (lhs > rhs) if rule.strict else (lhs >= rhs)
    ok[0] = False
    if not ok.any():
        raise MetricError("NO_COALITION", "no coalition satisfies the rule")
    sizes = bits.sum(axis=1)
    best_size = int(sizes[ok].min())
    stake_sums = _subset_sums(bits, stakes)
    best_stake = int(stake_sums[ok & (sizes == best_size)].min())
    return best_size, TokenAmount(best_stake, vs.decimals)

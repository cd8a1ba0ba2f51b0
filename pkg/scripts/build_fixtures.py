#!/usr/bin/env python3
"""Regenerate the eleven-chain fixture pack in src/posopen/fixtures/.

Only a handful of values are anchored to published figures (Ethereum's
32-token stake, BNB Chain's 29-validator cap, Solana's 2,000+ validators,
zero minimums on Cosmos Hub / Algorand / Solana, >10% APR on Cosmos Hub and
Klaytn, and Ethereum's >= $18B attack cost).  Everything else is a synthetic
stand-in shaped like the chain, and its provenance says so.

Output is deterministic: running this twice gives identical bytes.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Optional

from posopen.ingest import Anchor, ProvenanceEntry, SnapshotDocument, serialize_document
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
    ValidatorUnit,
)
from posopen.synthetic import distribute, zipf_weights

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "posopen" / "fixtures"
TAKEN_AT = datetime(2023, 4, 21, tzinfo=timezone.utc)
ANCHOR_DATE = "2023-04-21T00:00:00Z"
GENERATED_AT = "2026-10-16T00:00:00Z"
SURVEY = "literature: cross-chain PoS openness survey (2023)"

STAKE = ConsensusFamily.STAKE_PROPORTIONAL
COUNT = ConsensusFamily.VALIDATOR_COUNT


@dataclass
class ChainSpec:
    chain_id: str
    family: ConsensusFamily
    decimals: int
    n_validators: int
    zipf_s: str
    staked: int  # display units
    stake_floor: int  # display units, lower bound per validator
    min_stake: int  # display units
    circulating: int
    tradable: int
    price: str
    hw_monthly: str
    apr: Fraction
    max_count: Optional[int] = None
    stake_unit: int = 1  # display units; stakes are multiples of this
    unit: ValidatorUnit = ValidatorUnit.VALIDATOR
    undisclosed: tuple[str, ...] = ()
    exclusions: tuple[str, ...] = ()
    anchors: dict[str, tuple[str, str, str]] = field(default_factory=dict)


CHAINS = [
    ChainSpec(
        "algorand", COUNT, 6, 1500, "1.0", 2_000_000_000, 1, 0, 7_100_000_000, 7_000_000_000, "0.25", "150.00",
        Fraction(0), undisclosed=("validator_count",), exclusions=("foundation reserve",),
        anchors={
            "validator_set.min_stake_requirement": ("eq", "0", "capital requirement: no minimum stake"),
            "chain.undisclosed": ("eq", "validator_count", "results: validator count not disclosed"),
        },
    ),
    ChainSpec(
        "aptos", STAKE, 8, 105, "0.5", 830_000_000, 1_000_000, 1_000_000, 1_000_000_000, 1_000_000_000, "11.50",
        "1150.00", Fraction(7, 100),
    ),
    ChainSpec(
        "avalanche", STAKE, 9, 1300, "0.7", 250_000_000, 2_000, 2_000, 330_000_000, 330_000_000, "17.00", "220.00",
        Fraction(8, 100), exclusions=("burned fees",),
    ),
    ChainSpec(
        "bnb-chain", COUNT, 8, 29, "0.9", 25_000_000, 200_000, 10_000, 157_000_000, 157_000_000, "330.00", "600.00",
        Fraction(3, 100), max_count=29, exclusions=("auto-burned supply",),
        anchors={"validator_set.max_count": ("eq", "29", "validator count: maximum of 29 validators")},
    ),
    ChainSpec(
        "celo", COUNT, 18, 105, "0.2", 300_000_000, 10_000, 10_000, 470_000_000, 470_000_000, "0.70", "250.00",
        Fraction(6, 100), max_count=110, exclusions=("community fund reserve",),
    ),
    ChainSpec(
        "cosmos-hub", STAKE, 6, 175, "0.8", 200_000_000, 15_000, 0, 300_000_000, 290_000_000, "11.30", "250.00",
        Fraction(19, 100), max_count=175, exclusions=("community pool",),
        anchors={
            "validator_set.min_stake_requirement": ("eq", "0", "capital requirement: no minimum stake"),
            "costs.reward_apr": ("gt", "0.10", "operating cost: APR above 10%"),
        },
    ),
    ChainSpec(
        "ethereum", STAKE, 18, 1200, "1.1", 18_000_000, 32, 32, 120_400_000, 120_400_000, "2000", "150.00",
        Fraction(45, 1000), stake_unit=32, unit=ValidatorUnit.CLIENT,
        anchors={
            "validator_set.min_stake_requirement": ("eq", "32", "capital requirement: 32 tokens per validator"),
            "chain.validator_unit": ("eq", "client", "validator count: validators counted per client"),
            "derived.attack_capital_disruption_usd": ("ge", "18000000000", "economic stability: attack >= $18B"),
        },
    ),
    ChainSpec(
        "klaytn", COUNT, 18, 31, "0.6", 800_000_000, 5_000_000, 5_000_000, 3_100_000_000, 3_000_000_000, "0.23",
        "1100.00", Fraction(12, 100), exclusions=("ecosystem reserve",),
        anchors={"costs.reward_apr": ("gt", "0.10", "operating cost: APR above 10%")},
    ),
    ChainSpec(
        "near", STAKE, 24, 200, "0.9", 420_000_000, 25_000, 25_000, 880_000_000, 880_000_000, "2.00", "420.00",
        Fraction(9, 100),
    ),
    ChainSpec(
        "polygon", STAKE, 18, 100, "0.8", 3_600_000_000, 500_000, 1, 9_200_000_000, 9_200_000_000, "1.10", "500.00",
        Fraction(5, 100), max_count=100,
    ),
    ChainSpec(
        "solana", STAKE, 9, 2100, "1.0", 390_000_000, 1, 0, 550_000_000, 550_000_000, "22.00", "1500.00",
        Fraction(7, 100), exclusions=("unvested allocations",),
        anchors={
            "validator_set.count": ("gt", "2000", "capital concentration: over 2,000 validators"),
            "validator_set.min_stake_requirement": ("eq", "0", "capital requirement: no minimum stake"),
        },
    ),
]


def build(spec: ChainSpec) -> SnapshotDocument:
    scale = 10**spec.decimals

    def amount(display: int) -> TokenAmount:
        return TokenAmount(display * scale, spec.decimals)

    weights = zipf_weights(spec.n_validators, spec.zipf_s, 10**18)
    stakes = distribute(spec.staked * scale, weights, floor=spec.stake_floor * scale, unit=spec.stake_unit * scale)
    width = len(str(spec.n_validators))
    validators = tuple(
        Validator(f"{spec.chain_id}-{i:0{width}d}", TokenAmount(s, spec.decimals)) for i, s in enumerate(stakes, 1)
    )
    snapshot = ChainSnapshot(
        chain_id=spec.chain_id,
        taken_at=TAKEN_AT,
        consensus=ConsensusModel(spec.family),
        validator_set=ValidatorSet(validators, amount(spec.min_stake), spec.max_count),
        economics=TokenEconomics(
            circulating_supply=amount(spec.circulating),
            tradable_supply=amount(spec.tradable),
            staked_total=amount(spec.staked),
            price_usd_per_token=Decimal(spec.price),
            tradable_exclusions=spec.exclusions,
        ),
        costs=CostModel(UsdAmount.from_dollars(spec.hw_monthly), spec.apr),
        validator_unit=spec.unit,
        undisclosed=frozenset(spec.undisclosed),
    )

    synthetic = f"synthetic: scripts/build_fixtures.py stand-in (stakes zipf s={spec.zipf_s})"
    provenance = {
        key: ProvenanceEntry(synthetic, GENERATED_AT, "synthetic")
        for key in (
            "economics.circulating_supply",
            "economics.tradable_supply",
            "economics.staked_total",
            "economics.price_usd_per_token",
            "costs.hw_monthly_cost_usd",
            "costs.reward_apr",
            "validator_set.validators",
        )
    }
    if spec.chain_id == "ethereum":
        note = "synthetic: chosen so half the stake at the fixture price costs $18,000,000,000"
        for key in ("economics.staked_total", "economics.price_usd_per_token"):
            provenance[key] = ProvenanceEntry(note, GENERATED_AT, "synthetic")
    for key, (relation, value, where) in spec.anchors.items():
        provenance[key] = ProvenanceEntry(f"{SURVEY}, {where}", ANCHOR_DATE, "anchored", Anchor(relation, value))
    return SnapshotDocument(snapshot, provenance)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=OUT_DIR)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for spec in CHAINS:
        path = args.out / f"{spec.chain_id}.json"
        path.write_bytes(serialize_document(build(spec)))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

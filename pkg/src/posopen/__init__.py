"""Openness metrics for proof-of-stake validator sets."""

from .errors import IngestError, MetricError, OpennessError, ScoringError
from .ingest import export_report, load_cohort, load_snapshot, serialize_snapshot
from .metrics import (
    AttackEstimate,
    AttackGoal,
    AttackPath,
    CoalitionRule,
    Costing,
    attack_capital,
    attack_quantity,
    break_even_stake,
    consensus_stake_fraction,
    entry_capital,
    least_staked_validator,
    nakamoto_coefficient,
    operating_cost,
    oracle_min_coalition,
    quorum_stake,
    quorum_validator_count,
    staking_ratio,
    validator_count,
    voting_power,
)
from .model import (
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
    Violation,
    validate_snapshot,
)
from .scoring import Axis, Direction, OpennessReport, economic_stability_score, openness_report, rank_score

__version__ = "0.1.0"

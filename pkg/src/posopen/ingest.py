"""Snapshot and report file formats.

Snapshot documents are strict JSON: unknown keys, duplicate keys, float
literals for amounts and non-canonical number strings are all rejected.
Token amounts travel as ``{"base_units": "<decimal string>", "decimals": n}``.

Written documents carry a ``checksum`` (SHA-256 of the canonical JSON of the
rest of the document).  It is optional on input so snapshots can be written by
hand, but when present a mismatch is a parse error: a flipped digit in a price
is otherwise indistinguishable from a real price.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional

import jsonschema

from .errors import IngestError
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
from .metrics import AttackGoal, attack_quantity
from .scoring import AXIS_DIRECTIONS, AXIS_INPUTS, Axis, OpennessReport

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = (1,)
REPORT_VERSION = 1

REQUIRED_PROVENANCE = (
    "economics.circulating_supply",
    "economics.tradable_supply",
    "economics.staked_total",
    "economics.price_usd_per_token",
    "costs.hw_monthly_cost_usd",
    "costs.reward_apr",
)

_INT_STRING = r"^-?(0|[1-9][0-9]*)$"
_DECIMAL_STRING = r"^-?(0|[1-9][0-9]*)(\.[0-9]+)?$"
_CENTS_STRING = r"^-?(0|[1-9][0-9]*)\.[0-9]{2}$"
_TIMESTAMP = r"^[0-9]{4}-[0-9]{2}-[0-9]{2}T[0-9]{2}:[0-9]{2}:[0-9]{2}(\.[0-9]{6})?Z$"


def _obj(properties: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": list(properties) if required is None else required,
        "additionalProperties": False,
    }


_AMOUNT = _obj({"base_units": {"type": "string", "pattern": _INT_STRING}, "decimals": {"type": "integer"}})
_RATIO = _obj({"num": {"type": "integer"}, "den": {"type": "integer"}})
_PROVENANCE_ENTRY = _obj(
    {
        "source": {"type": "string", "minLength": 1},
        "retrieved_at": {"type": "string", "pattern": _TIMESTAMP},
        "basis": {"enum": ["anchored", "synthetic", "unspecified"]},
        "anchor": _obj({"relation": {"enum": ["eq", "ge", "gt"]}, "value": {"type": "string"}}),
    },
    required=["source", "retrieved_at", "basis"],
)

SNAPSHOT_SCHEMA = _obj(
    {
        "format_version": {"type": "integer"},
        "chain": _obj(
            {
                "id": {"type": "string"},
                "taken_at": {"type": "string", "pattern": _TIMESTAMP},
                "validator_unit": {"enum": [u.value for u in ValidatorUnit]},
                "undisclosed": {"type": "array", "items": {"type": "string"}},
            }
        ),
        "consensus": _obj({"family": {"enum": [f.value for f in ConsensusFamily]}, "quorum": _RATIO}),
        "validator_set": _obj(
            {
                "min_stake_requirement": _AMOUNT,
                "max_count": {"type": ["integer", "null"]},
                "below_minimum_waiver": {"type": "boolean"},
                "validators": {
                    "type": "array",
                    "items": _obj({"id": {"type": "string"}, "stake": _AMOUNT}),
                },
            }
        ),
        "economics": _obj(
            {
                "circulating_supply": _AMOUNT,
                "tradable_supply": _AMOUNT,
                "staked_total": _AMOUNT,
                "price_usd_per_token": {"type": "string", "pattern": _DECIMAL_STRING},
                "tradable_exclusions": {"type": "array", "items": {"type": "string"}},
            }
        ),
        "costs": _obj(
            {
                "hw_monthly_cost_usd": {"type": "string", "pattern": _CENTS_STRING},
                "reward_apr": _RATIO,
            }
        ),
        "provenance": {"type": "object", "additionalProperties": _PROVENANCE_ENTRY},
        "checksum": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
    },
    required=["format_version", "chain", "consensus", "validator_set", "economics", "costs", "provenance"],
)

REPORT_SCHEMA = _obj(
    {
        "report_version": {"const": REPORT_VERSION},
        "cohort_id": {"type": "string"},
        "axes": {"type": "array", "items": {"enum": [a.value for a in Axis]}, "minItems": 5, "maxItems": 5},
        "chains": {
            "type": "array",
            "items": _obj(
                {
                    "chain_id": {"type": "string"},
                    "scores": {
                        "type": "array",
                        "items": {"type": ["integer", "null"], "minimum": 1, "maximum": 5},
                        "minItems": 5,
                        "maxItems": 5,
                    },
                    "total": {"type": "integer"},
                    "partial": {"type": "boolean"},
                }
            ),
        },
        "radar": {
            "type": "array",
            "items": _obj(
                {
                    "chain_id": {"type": "string"},
                    "values": {"type": "array", "items": {"type": ["integer", "null"]}},
                }
            ),
        },
    }
)


@dataclass(frozen=True)
class Anchor:
    relation: str
    value: str


@dataclass(frozen=True)
class ProvenanceEntry:
    source: str
    retrieved_at: str
    basis: str = "unspecified"
    anchor: Optional[Anchor] = None


@dataclass(frozen=True)
class SnapshotDocument:
    snapshot: ChainSnapshot
    provenance: Mapping[str, ProvenanceEntry] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION


# ---------------------------------------------------------------- parsing


def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _reject_float(text: str):
    raise ValueError(f"float literal {text} not allowed")


def _decode(data: bytes | str) -> object:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError("PARSE_ERROR", f"not UTF-8: {exc}", location=f"byte {exc.start}") from exc
    try:
        return json.loads(data, object_pairs_hook=_reject_duplicates, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise IngestError("PARSE_ERROR", exc.msg, location=f"line {exc.lineno} column {exc.colno}") from exc
    except ValueError as exc:
        raise IngestError("PARSE_ERROR", str(exc)) from exc


def _json_path(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<document>"


def document_checksum(body: dict) -> str:
    """SHA-256 over the canonical encoding of ``body`` minus any checksum key."""
    body = {k: v for k, v in body.items() if k != "checksum"}
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _amount(raw: dict) -> TokenAmount:
    return TokenAmount(int(raw["base_units"]), raw["decimals"])


def _timestamp(text: str) -> datetime:
    return datetime.fromisoformat(text[:-1]).replace(tzinfo=timezone.utc)


def _ratio(raw: dict, where: str) -> Fraction:
    if raw["den"] == 0:
        raise IngestError("VALIDATION_ERROR", "zero denominator", location=where,
                          violations=[Violation("ZERO_DENOMINATOR", where, "denominator must be non-zero")])
    return Fraction(raw["num"], raw["den"])


def _build_snapshot(raw: dict) -> ChainSnapshot:
    chain, cons, vset, econ, costs = (raw[k] for k in ("chain", "consensus", "validator_set", "economics", "costs"))
    return ChainSnapshot(
        chain_id=chain["id"],
        taken_at=_timestamp(chain["taken_at"]),
        consensus=ConsensusModel(ConsensusFamily(cons["family"]), cons["quorum"]["num"], cons["quorum"]["den"]),
        validator_set=ValidatorSet(
            validators=tuple(Validator(v["id"], _amount(v["stake"])) for v in vset["validators"]),
            min_stake_requirement=_amount(vset["min_stake_requirement"]),
            max_count=vset["max_count"],
            below_minimum_waiver=vset["below_minimum_waiver"],
        ),
        economics=TokenEconomics(
            circulating_supply=_amount(econ["circulating_supply"]),
            tradable_supply=_amount(econ["tradable_supply"]),
            staked_total=_amount(econ["staked_total"]),
            price_usd_per_token=Decimal(econ["price_usd_per_token"]),
            tradable_exclusions=tuple(econ["tradable_exclusions"]),
        ),
        costs=CostModel(
            hw_monthly_cost_usd=UsdAmount(int(costs["hw_monthly_cost_usd"].replace(".", ""))),
            reward_apr=_ratio(costs["reward_apr"], "costs.reward_apr"),
        ),
        validator_unit=ValidatorUnit(chain["validator_unit"]),
        undisclosed=frozenset(chain["undisclosed"]),
    )


def parse_document(data: bytes | str) -> SnapshotDocument:
    """Parse and validate one snapshot document."""
    raw = _decode(data)
    if not isinstance(raw, dict) or "format_version" not in raw:
        raise IngestError("PARSE_ERROR", "expected an object with format_version", location="<document>")
    version = raw["format_version"]
    if not isinstance(version, int) or isinstance(version, bool) or version not in SUPPORTED_VERSIONS:
        raise IngestError("UNSUPPORTED_VERSION", f"format_version {version!r} is not supported")
    errors = sorted(jsonschema.Draft202012Validator(SNAPSHOT_SCHEMA).iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        first = errors[0]
        raise IngestError("PARSE_ERROR", first.message, location=_json_path(first.absolute_path))
    if "checksum" in raw and raw["checksum"] != document_checksum(raw):
        raise IngestError("PARSE_ERROR", "checksum does not match document contents", location="checksum")

    try:
        snapshot = _build_snapshot(raw)
    except ValueError as exc:
        raise IngestError("PARSE_ERROR", str(exc)) from exc
    provenance = {
        key: ProvenanceEntry(
            entry["source"],
            entry["retrieved_at"],
            entry["basis"],
            Anchor(**entry["anchor"]) if "anchor" in entry else None,
        )
        for key, entry in raw["provenance"].items()
    }

    violations = validate_snapshot(snapshot)
    for key in REQUIRED_PROVENANCE:
        if key not in provenance:
            violations.append(Violation("MISSING_PROVENANCE", f"provenance.{key}", "no source annotation"))
    if violations:
        listing = "; ".join(str(v) for v in violations)
        raise IngestError("VALIDATION_ERROR", listing, violations=violations)
    return SnapshotDocument(snapshot, provenance, version)


def load_snapshot(data: bytes | str) -> ChainSnapshot:
    return parse_document(data).snapshot


def load_document_file(path: Path | str) -> SnapshotDocument:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IngestError("IO_ERROR", exc.strerror or str(exc), location=str(path)) from exc
    try:
        return parse_document(data)
    except IngestError as exc:
        where = f"{path.name}: {exc.location}" if exc.location else path.name
        raise IngestError(exc.code, exc.detail, location=where, violations=exc.violations) from exc


def load_cohort(directory: Path | str) -> list[ChainSnapshot]:
    """Load every ``*.json`` snapshot in ``directory``, sorted by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise IngestError("IO_ERROR", f"not a directory: {directory}")
    snapshots: list[ChainSnapshot] = []
    seen: dict[str, str] = {}
    for path in sorted(directory.glob("*.json")):
        snap = load_document_file(path).snapshot
        if snap.chain_id in seen:
            raise IngestError(
                "DUPLICATE_CHAIN_ID",
                f"chain {snap.chain_id!r} also defined in {seen[snap.chain_id]}",
                location=path.name,
            )
        seen[snap.chain_id] = path.name
        snapshots.append(snap)
    return snapshots


# ---------------------------------------------------------- serialization


def _amount_doc(amount: TokenAmount) -> dict:
    return {"base_units": str(amount.base_units), "decimals": amount.decimals}


def _ratio_doc(value: Fraction) -> dict:
    return {"num": value.numerator, "den": value.denominator}


def _cents_doc(amount: UsdAmount) -> str:
    sign = "-" if amount.cents < 0 else ""
    whole, cents = divmod(abs(amount.cents), 100)
    return f"{sign}{whole}.{cents:02d}"


def _timestamp_doc(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts.isoformat(timespec="microseconds" if ts.microsecond else "seconds") + "Z"


def _default_provenance(snapshot: ChainSnapshot) -> dict[str, ProvenanceEntry]:
    stamp = _timestamp_doc(snapshot.taken_at)
    return {key: ProvenanceEntry("unspecified", stamp) for key in REQUIRED_PROVENANCE}


def document_to_dict(doc: SnapshotDocument) -> dict:
    s = doc.snapshot
    provenance = {}
    for key, entry in sorted(doc.provenance.items()):
        item = {"source": entry.source, "retrieved_at": entry.retrieved_at, "basis": entry.basis}
        if entry.anchor is not None:
            item["anchor"] = {"relation": entry.anchor.relation, "value": entry.anchor.value}
        provenance[key] = item
    return {
        "format_version": doc.format_version,
        "chain": {
            "id": s.chain_id,
            "taken_at": _timestamp_doc(s.taken_at),
            "validator_unit": s.validator_unit.value,
            "undisclosed": sorted(s.undisclosed),
        },
        "consensus": {
            "family": s.consensus.family.value,
            "quorum": {"num": s.consensus.quorum_num, "den": s.consensus.quorum_den},
        },
        "validator_set": {
            "min_stake_requirement": _amount_doc(s.validator_set.min_stake_requirement),
            "max_count": s.validator_set.max_count,
            "below_minimum_waiver": s.validator_set.below_minimum_waiver,
            "validators": [{"id": v.id, "stake": _amount_doc(v.stake)} for v in s.validator_set.validators],
        },
        "economics": {
            "circulating_supply": _amount_doc(s.economics.circulating_supply),
            "tradable_supply": _amount_doc(s.economics.tradable_supply),
            "staked_total": _amount_doc(s.economics.staked_total),
            "price_usd_per_token": format(s.economics.price_usd_per_token, "f"),
            "tradable_exclusions": list(s.economics.tradable_exclusions),
        },
        "costs": {
            "hw_monthly_cost_usd": _cents_doc(s.costs.hw_monthly_cost_usd),
            "reward_apr": _ratio_doc(s.costs.reward_apr),
        },
        "provenance": provenance,
    }


def serialize_document(doc: SnapshotDocument) -> bytes:
    body = document_to_dict(doc)
    body["checksum"] = document_checksum(body)
    return (json.dumps(body, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def serialize_snapshot(snapshot: ChainSnapshot, provenance: Mapping[str, ProvenanceEntry] | None = None) -> bytes:
    if provenance is None:
        provenance = _default_provenance(snapshot)
    return serialize_document(SnapshotDocument(snapshot, provenance))


def fixture_dir() -> Path:
    """Directory holding the bundled eleven-chain fixture pack."""
    return Path(__file__).resolve().parent / "fixtures"


def resolve_field(snapshot: ChainSnapshot, key: str) -> str:
    """Textual value of a provenance key, token amounts in display units."""
    if key == "validator_set.count":
        return str(len(snapshot.validator_set))
    if key == "chain.validator_unit":
        return snapshot.validator_unit.value
    if key == "chain.undisclosed":
        return ",".join(sorted(snapshot.undisclosed))
    if key == "derived.attack_capital_disruption_usd":
        capital = attack_quantity(snapshot, AttackGoal.DISRUPTION).capital
        return str(Decimal(capital.cents).scaleb(-2))
    section, _, name = key.partition(".")
    value = getattr(getattr(snapshot, section), name)
    if isinstance(value, TokenAmount):
        return str(Decimal(value.base_units).scaleb(-value.decimals).normalize())
    if isinstance(value, UsdAmount):
        return str(Decimal(value.cents).scaleb(-2))
    if isinstance(value, Fraction):
        return str(Decimal(value.numerator) / Decimal(value.denominator))
    return str(value)


def anchor_holds(snapshot: ChainSnapshot, key: str, anchor: Anchor) -> bool:
    actual = resolve_field(snapshot, key)
    try:
        a, b = Decimal(actual), Decimal(anchor.value)
    except ArithmeticError:
        return anchor.relation == "eq" and actual == anchor.value
    return {"eq": a == b, "ge": a >= b, "gt": a > b}[anchor.relation]


# ----------------------------------------------------------------- reports

AXIS_LABELS = {
    Axis.VALIDATORS: "Validators",
    Axis.ENTRY_CAPITAL: "Entry capital",
    Axis.CAPITAL_CONCENTRATION: "Concentration",
    Axis.OPERATING_COST: "Operating cost",
    Axis.ECONOMIC_STABILITY: "Econ. stability",
}


def report_to_dict(report: OpennessReport) -> dict:
    order = report.ranked_chain_ids()
    return {
        "report_version": REPORT_VERSION,
        "cohort_id": report.cohort_id,
        "axes": [a.value for a in report.axes],
        "chains": [
            {
                "chain_id": c,
                "scores": list(report.radar[c]),
                "total": report.per_chain[c].total,
                "partial": report.per_chain[c].partial,
            }
            for c in order
        ],
        "radar": [{"chain_id": c, "values": list(report.radar[c])} for c in order],
    }


def _raw_value(report: OpennessReport, chain: str, axis: Axis) -> str:
    m = report.metrics[chain]
    if axis is Axis.VALIDATORS:
        return f"{m.validator_count:,}"
    if axis is Axis.ENTRY_CAPITAL:
        return m.entry_capital_usd.format()
    if axis is Axis.CAPITAL_CONCENTRATION:
        return f"nakamoto {m.nakamoto}"
    if axis is Axis.OPERATING_COST:
        return m.operating_cost_usd.format() + "/mo"
    return f"staking {float(m.staking_ratio):.1%}, attack {m.attack_capital_usd.format()}"


def _human_report(report: OpennessReport) -> str:
    order = report.ranked_chain_ids()
    name_width = max(len("Chain"), *(len(c) for c in order))
    widths = [max(len(AXIS_LABELS[a]), 3) for a in report.axes]
    lines = [
        f"Openness levels, cohort {report.cohort_id} (1 = least open, 5 = most open)",
        "",
        "  ".join(["Chain".ljust(name_width)] + [AXIS_LABELS[a].rjust(w) for a, w in zip(report.axes, widths)])
        + "  Total",
    ]
    lines.append("-" * len(lines[-1]))
    any_partial = False
    for chain in order:
        row = report.per_chain[chain]
        cells = ["-" if v is None else str(v) for v in report.radar[chain]]
        total = f"{row.total}*" if row.partial else f"{row.total} "
        any_partial |= row.partial
        lines.append(
            "  ".join([chain.ljust(name_width)] + [c.rjust(w) for c, w in zip(cells, widths)]) + "  " + total.rjust(6)
        )
    if any_partial:
        lines.append("")
        for chain in order:
            row = report.per_chain[chain]
            if row.partial:
                missing = [AXIS_LABELS[a] for a, v in zip(report.axes, report.radar[chain]) if v is None]
                lines.append(
                    f"* {chain}: partial total over {len(row.scores)} of {len(report.axes)} axes; "
                    f"unscored: {', '.join(missing)}"
                )
    lines += ["", "Axis notes:"]
    for axis, column in zip(report.axes, zip(*(report.radar[c] for c in order))):
        scored = [(v, c) for c, v in zip(order, column) if v is not None]
        if not scored:
            lines.append(f"  {AXIS_LABELS[axis]}: not scored, fewer than two chains disclose its inputs")
            continue
        best = min(scored, key=lambda t: (-t[0], t[1]))[1]
        worst = min(scored)[1]
        direction = "higher" if AXIS_DIRECTIONS[axis].value.startswith("higher") else "lower"
        lines.append(
            f"  {AXIS_LABELS[axis]} ({direction} raw value is more open; inputs {'/'.join(AXIS_INPUTS[axis])}): "
            f"most open {best} ({_raw_value(report, best, axis)}), "
            f"least open {worst} ({_raw_value(report, worst, axis)})"
        )
    return "\n".join(lines) + "\n"


def export_report(report: OpennessReport, fmt: str = "machine") -> bytes:
    """Render ``report`` as a versioned JSON document or a text table."""
    if fmt == "machine":
        return (json.dumps(report_to_dict(report), indent=2) + "\n").encode("utf-8")
    if fmt == "human":
        return _human_report(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")

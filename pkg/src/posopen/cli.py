"""Command-line entry point: ``posopen <command> ...``.

Exit codes: 0 success, 1 domain error (invalid snapshot, metric or scoring
failure), 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .errors import IngestError, MetricError, OpennessError
from .ingest import export_report, load_cohort, load_document_file
from .metrics import (
    DEFAULT_THRESHOLD,
    AttackEstimate,
    AttackGoal,
    Costing,
    attack_quantity,
    break_even_stake,
    consensus_stake_fraction,
    consensus_stake_flag,
    entry_capital,
    nakamoto_coefficient,
    quorum_stake,
    quorum_validator_count,
    staking_ratio,
    validator_count,
)
from .model import ChainSnapshot
from .radar import render_radar
from .scoring import openness_report

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


def fraction_arg(text: str) -> Fraction:
    try:
        num, den = text.split("/")
        value = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected N/D, got {text!r}") from None
    return value


def threshold_arg(text: str) -> Fraction:
    value = fraction_arg(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"threshold must lie strictly between 0 and 1, got {value}")
    return value


def quorum_arg(text: str) -> Fraction:
    value = fraction_arg(text)
    if not Fraction(1, 2) < value <= 1:
        raise argparse.ArgumentTypeError(f"quorum must lie in (1/2, 1], got {value}")
    return value


def _with_quorum(snapshot: ChainSnapshot, quorum: Optional[Fraction]) -> ChainSnapshot:
    if quorum is None:
        return snapshot
    return dataclasses.replace(snapshot, consensus=snapshot.consensus.with_quorum(quorum))


def _pct(value: Fraction) -> str:
    return f"{float(value) * 100:.2f}%"


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_bytes(text.encode("utf-8"))


def _estimate_dict(est: AttackEstimate) -> dict:
    return {
        "goal": est.goal.value,
        "quantity_base_units": str(est.quantity.base_units),
        "quantity": est.quantity.format(),
        "capital_usd": est.capital.format(),
        "path": est.path.value,
        "feasible": est.feasible,
        "coalition_size": est.coalition_size,
    }


def _estimate_lines(est: AttackEstimate) -> list[str]:
    size = "" if est.coalition_size is None else f", {est.coalition_size} validators"
    return [
        f"attack ({est.goal.value})",
        f"  quantity                {est.quantity.format()} tokens",
        f"  capital                 {est.capital.format()}",
        f"  path                    {est.path.value}{size}",
        f"  feasible                {'yes' if est.feasible else 'no'}",
    ]


def _load_one(path: str) -> ChainSnapshot:
    return load_document_file(path).snapshot


def cmd_validate(args) -> int:
    status = EXIT_OK
    files: list[Path] = []
    for name in args.paths:
        p = Path(name)
        if p.is_dir():
            files += sorted(p.glob("*.json"))
        elif p.exists():
            files.append(p)
        else:
            print(f"{name}: IO_ERROR: no such file or directory", file=sys.stderr)
            status = EXIT_IO
    for path in files:
        try:
            load_document_file(path)
        except IngestError as exc:
            if exc.code == "IO_ERROR":
                print(f"{path}: IO_ERROR: {exc.detail}", file=sys.stderr)
                status = EXIT_IO
                continue
            if exc.violations:
                for v in exc.violations:
                    print(f"{path}:{v.field}: {v.code}: {v.message}")
            else:
                print(f"{path}:{exc.location or ''}: {exc.code}: {exc.detail}")
            status = max(status, EXIT_DOMAIN)
        else:
            print(f"{path}: OK")
    return status


def cmd_analyze(args) -> int:
    snap = _with_quorum(_load_one(args.path), args.quorum)
    vs, model = snap.validator_set, snap.consensus
    min_usd, least_usd = entry_capital(snap)
    fraction = consensus_stake_fraction(snap)
    try:
        be_usd, be_tokens = break_even_stake(snap)
        break_even = {"usd": be_usd.format(), "tokens": be_tokens.format()}
    except MetricError as exc:
        if exc.code != "ZERO_APR":
            raise
        break_even = None
    attacks = [attack_quantity(snap, goal, costing=args.costing) for goal in AttackGoal]
    threshold = args.threshold
    result = {
        "chain_id": snap.chain_id,
        "consensus": model.family.value,
        "quorum": str(model.quorum),
        "validator_unit": snap.validator_unit.value,
        "validator_count": validator_count(snap),
        "entry_capital_min_usd": min_usd.format(),
        "entry_capital_least_staked_usd": least_usd.format(),
        "nakamoto_threshold": str(threshold),
        "nakamoto_coefficient": nakamoto_coefficient(vs, model, threshold),
        "quorum_validator_count": quorum_validator_count(vs, model),
        "quorum_stake": quorum_stake(vs, model).format(),
        "staking_ratio": str(staking_ratio(snap)),
        "consensus_stake_fraction": str(fraction),
        "consensus_stake_flag": consensus_stake_flag(fraction),
        "break_even": break_even if break_even is not None else "infeasible",
        "attacks": [_estimate_dict(a) for a in attacks],
    }
    if args.format == "machine":
        _write(json.dumps(result, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [
        f"chain {snap.chain_id} ({model.family.value}, quorum {model.quorum}, counted per {snap.validator_unit.value})",
        f"validator count           {result['validator_count']:,}",
        f"entry capital (minimum)   {result['entry_capital_min_usd']}",
        f"entry capital (least)     {result['entry_capital_least_staked_usd']}",
        f"nakamoto (> {threshold})".ljust(26) + str(result["nakamoto_coefficient"]),
        f"quorum validator count    {result['quorum_validator_count']}",
        f"quorum stake              {result['quorum_stake']} tokens",
        f"staking ratio             {_pct(staking_ratio(snap))}",
        f"consensus stake fraction  {_pct(fraction)} ({result['consensus_stake_flag']})",
        "break-even stake          "
        + (f"{break_even['usd']} ({break_even['tokens']} tokens)" if break_even else "infeasible"),
    ]
    for est in attacks:
        lines += _estimate_lines(est)
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_attack_cost(args) -> int:
    snap = _with_quorum(_load_one(args.path), args.quorum)
    est = attack_quantity(snap, args.goal, costing=args.costing)
    if args.format == "machine":
        _write(json.dumps({"chain_id": snap.chain_id, **_estimate_dict(est)}, indent=2) + "\n", args.out)
    else:
        _write("\n".join([f"chain {snap.chain_id}"] + _estimate_lines(est)) + "\n", args.out)
    return EXIT_OK


def _cohort_report(args):
    directory = Path(args.directory)
    cohort = [_with_quorum(s, args.quorum) for s in load_cohort(directory)]
    return openness_report(
        cohort, directory.resolve().name, threshold=args.threshold, goal=args.goal, costing=args.costing
    )


def cmd_compare(args) -> int:
    report = _cohort_report(args)
    sys.stdout.write(export_report(report, args.format).decode("utf-8"))
    if args.out:
        Path(args.out).write_bytes(export_report(report, "machine"))
    return EXIT_OK


def cmd_radar(args) -> int:
    report = _cohort_report(args)
    chains = args.chains.split(",") if args.chains else None
    if chains is not None:
        unknown = sorted(set(chains) - set(report.per_chain))
        if unknown:
            print(f"error: unknown chain ids: {', '.join(unknown)}", file=sys.stderr)
            return EXIT_DOMAIN
    Path(args.out).write_bytes(render_radar(report, chains).encode("utf-8"))
    return EXIT_OK


def _metric_flags(p: argparse.ArgumentParser, goal_default: Optional[AttackGoal] = AttackGoal.DISRUPTION) -> None:
    p.add_argument("--threshold", type=threshold_arg, default=DEFAULT_THRESHOLD, metavar="N/D",
                   help="Nakamoto control threshold (default 1/3)")
    p.add_argument("--quorum", type=quorum_arg, default=None, metavar="N/D",
                   help="override every snapshot's quorum fraction (snapshots default to 2/3)")
    p.add_argument("--goal", type=AttackGoal, choices=list(AttackGoal), default=goal_default,
                   metavar="disruption|takeover")
    p.add_argument("--costing", type=Costing, choices=list(Costing), default=Costing.PROTOCOL_MIN,
                   metavar="protocol-min|least-staked")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posopen", description="Proof-of-stake openness metrics and scoring.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate snapshot files or directories")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="print every metric for one snapshot")
    p.add_argument("path")
    _metric_flags(p)
    p.add_argument("--format", choices=["human", "machine"], default="human")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("attack-cost", help="estimate the capital needed to attack one chain")
    p.add_argument("path")
    _metric_flags(p)
    p.add_argument("--format", choices=["human", "machine"], default="human")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_attack_cost)

    p = sub.add_parser("compare", help="score a cohort directory on the openness axes")
    p.add_argument("directory")
    _metric_flags(p)
    p.add_argument("--format", choices=["human", "machine"], default="human")
    p.add_argument("--out", metavar="PATH", help="also write the machine-format report here")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("radar", help="write an SVG radar chart for a cohort directory")
    p.add_argument("directory")
    _metric_flags(p)
    p.add_argument("--out", metavar="PATH", required=True)
    p.add_argument("--chains", help="comma-separated chain ids to plot (default: all)")
    p.set_defaults(func=cmd_radar)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    try:
        return args.func(args)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if exc.code == "IO_ERROR" else EXIT_DOMAIN
    except OpennessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Score the fixture pack and write the table, machine report and radar chart."""

import argparse
from pathlib import Path

from posopen.ingest import export_report, fixture_dir, load_cohort
from posopen.radar import render_radar
from posopen.scoring import openness_report


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cohort", type=Path, default=fixture_dir(), help="snapshot directory (default: fixtures)")
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()

    report = openness_report(load_cohort(args.cohort), args.cohort.resolve().name)
    args.out.mkdir(parents=True, exist_ok=True)
    table = export_report(report, "human")
    (args.out / "report.txt").write_bytes(table)
    (args.out / "report.json").write_bytes(export_report(report, "machine"))
    (args.out / "radar.svg").write_text(render_radar(report, title="Openness levels"), encoding="utf-8")
    print(table.decode("utf-8"), end="")
    print(f"\nwrote report.txt, report.json and radar.svg to {args.out}/")


if __name__ == "__main__":
    main()

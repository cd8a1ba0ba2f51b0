"""Static SVG radar chart of openness scores.

Hand-written SVG rather than a plotting library so that identical reports give
byte-identical files (no embedded dates, random ids or font metrics).
"""

from __future__ import annotations

import math
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .scoring import AXES, MAX_SCORE, OpennessReport

AXIS_TITLES = ("Validators", "Entry capital", "Capital concentration", "Operating cost", "Economic stability")

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
)

SIZE = 640
CENTER = 300.0
RADIUS = 220.0


def _point(axis_index: int, value: float, n_axes: int) -> tuple[float, float]:
    # First axis points straight up, the rest follow clockwise.
    angle = -math.pi / 2 + 2 * math.pi * axis_index / n_axes
    r = RADIUS * value / MAX_SCORE
    return CENTER + r * math.cos(angle), CENTER + r * math.sin(angle)


def _fmt(x: float) -> str:
    text = f"{x:.2f}"
    return "0.00" if text == "-0.00" else text


def _points(values: Sequence[float], n_axes: int) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (_point(i, v, n_axes) for i, v in enumerate(values)))


def render_radar(report: OpennessReport, chains: Optional[Sequence[str]] = None, title: str = "") -> str:
    """One polygon per chain over the fixed axes; missing scores sit at the centre."""
    order = [c for c in report.ranked_chain_ids() if chains is None or c in chains]
    n_axes = len(AXES)
    legend_h = 20 * len(order)
    height = max(SIZE, int(CENTER + RADIUS) + 60 + legend_h)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE + 200}" height="{height}" '
        f'viewBox="0 0 {SIZE + 200} {height}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title or f'Openness radar: {report.cohort_id}')}</title>",
        '<rect width="100%" height="100%" fill="#ffffff"/>',
        '<g id="grid" fill="none" stroke="#cccccc" stroke-width="1">',
    ]
    for ring in range(1, MAX_SCORE + 1):
        out.append(f'<polygon class="ring" data-level="{ring}" points="{_points([ring] * n_axes, n_axes)}"/>')
    for i in range(n_axes):
        x, y = _point(i, MAX_SCORE, n_axes)
        out.append(f'<line class="spoke" x1="{_fmt(CENTER)}" y1="{_fmt(CENTER)}" x2="{_fmt(x)}" y2="{_fmt(y)}"/>')
    out.append("</g>")
    out.append('<g id="axes" fill="#333333" text-anchor="middle">')
    for i, label in enumerate(AXIS_TITLES):
        x, y = _point(i, MAX_SCORE + 0.55, n_axes)
        out.append(f'<text class="axis-label" x="{_fmt(x)}" y="{_fmt(y)}">{escape(label)}</text>')
    out.append("</g>")
    out.append('<g id="chains" stroke-width="2">')
    for k, chain in enumerate(order):
        color = PALETTE[k % len(PALETTE)]
        values = [0 if v is None else v for v in report.radar[chain]]
        out.append(
            f'<polygon class="chain" data-chain="{escape(chain)}" points="{_points(values, n_axes)}" '
            f'fill="{color}" fill-opacity="0.12" stroke="{color}"/>'
        )
    out.append("</g>")
    out.append('<g id="legend">')
    for k, chain in enumerate(order):
        color = PALETTE[k % len(PALETTE)]
        y = 40 + 20 * k
        mark = "*" if report.per_chain[chain].partial else ""
        out.append(f'<rect x="{SIZE}" y="{y - 10}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="{SIZE + 18}" y="{y}">{escape(chain)}{mark} ({report.per_chain[chain].total})</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

"""
Standalone SVG chart of a certificate curve with optional trial scatter.
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape

from slices.exceptions import InvalidInputError
from slices.slice_fairgen.core import TrialPoint
from slices.slice_general.core import SweepPoint

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 64
MARGIN_RIGHT = 24
MARGIN_TOP = 24
MARGIN_BOTTOM = 52
TICKS = 5


def _span(lo: float, hi: float) -> Tuple[float, float]:
    if hi > lo:
        return lo, hi
    pad = max(abs(lo) * 0.05, 0.05)
    return lo - pad, hi + pad


def axis_ranges(points: Sequence[SweepPoint], trials: Sequence[TrialPoint]) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """x covers every radius and trial distance; y runs from 0 to the largest bound or loss."""
    xs = [p.rho for p in points] + [t.distance for t in trials]
    ys = [p.bound for p in points if p.feasible] + [t.loss for t in trials]
    y_top = max([0.0] + ys)
    return _span(min(xs), max(xs)), (0.0, y_top if y_top > 0 else 1.0)


def render_svg(
    points: Sequence[SweepPoint],
    trials: Optional[Sequence[TrialPoint]] = None,
    title: str = "fairness certificate",
) -> str:
    if not points:
        raise InvalidInputError("cannot plot an empty sweep")
    trials = list(trials or [])
    (x_lo, x_hi), (y_lo, y_hi) = axis_ranges(points, trials)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    x0, y0 = MARGIN_LEFT, MARGIN_TOP + plot_h
    parts: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-x-min="{x_lo:.17g}" data-x-max="{x_hi:.17g}" '
        f'data-y-min="{y_lo:.17g}" data-y-max="{y_hi:.17g}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN_TOP}" stroke="black"/>',
    ]
    for i in range(TICKS + 1):
        xv = x_lo + (x_hi - x_lo) * i / TICKS
        yv = y_lo + (y_hi - y_lo) * i / TICKS
        parts.append(
            f'<text x="{sx(xv):.2f}" y="{y0 + 18}" font-size="11" text-anchor="middle">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{x0 - 6}" y="{sy(yv) + 4:.2f}" font-size="11" text-anchor="end">{yv:.3g}</text>'
        )
    parts.append(
        f'<text x="{x0 + plot_w / 2:.2f}" y="{HEIGHT - 12}" font-size="12" text-anchor="middle">'
        "Hellinger distance</text>"
    )
    parts.append(
        f'<text x="14" y="{MARGIN_TOP + plot_h / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {MARGIN_TOP + plot_h / 2:.2f})">expected loss</text>'
    )

    parts.append('<g class="trials" fill="#9a9a9a" fill-opacity="0.5">')
    for t in trials:
        parts.append(f'<circle cx="{sx(t.distance):.2f}" cy="{sy(t.loss):.2f}" r="2"/>')
    parts.append("</g>")

    coords = " ".join(f"{sx(p.rho):.2f},{sy(p.bound):.2f}" for p in points if p.feasible)
    parts.append(f'<polyline class="bound" fill="none" stroke="black" stroke-width="2" points="{coords}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(
    path: Union[str, Path],
    points: Sequence[SweepPoint],
    trials: Optional[Sequence[TrialPoint]] = None,
) -> None:
    Path(path).write_text(render_svg(points, trials), encoding="utf-8")

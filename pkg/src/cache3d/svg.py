"""Static SVG 1.1 charts drawn straight from sweep rows.

Three views of a sweep: delay against area budget, the share of area spent
on each level, and how the silicon layers are split between levels.  Budgets
without a feasible design leave an empty slot.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import List, Sequence
from xml.sax.saxutils import escape

from .sweep import SweepRow

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 60
LEVEL_COLORS = ("#4477aa", "#ee6677", "#228833")
DEPTH_COLORS = {1: "#4477aa", 2: "#ee6677", 3: "#228833"}


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _tick_label(v: float) -> str:
    return f"{v:.3g}"


class _Axes:
    def __init__(self, budgets: Sequence[float], y_max: float, y_min: float = 0.0):
        self.budgets = list(budgets)
        lo, hi = min(self.budgets), max(self.budgets)
        self.log_x = lo > 0 and hi / lo >= 10
        self.x_lo, self.x_hi = (math.log10(lo), math.log10(hi)) if self.log_x else (lo, hi)
        if self.x_hi == self.x_lo:
            self.x_hi = self.x_lo + 1
        self.y_lo, self.y_hi = y_min, (y_max if y_max > y_min else y_min + 1)
        self.pw = WIDTH - LEFT - RIGHT
        self.ph = HEIGHT - TOP - BOTTOM

    def x(self, b: float) -> float:
        v = math.log10(b) if self.log_x else b
        return LEFT + (v - self.x_lo) / (self.x_hi - self.x_lo) * self.pw

    def y(self, v: float) -> float:
        return TOP + self.ph - (v - self.y_lo) / (self.y_hi - self.y_lo) * self.ph

    def slot(self) -> float:
        n = len(self.budgets)
        return 0.8 * self.pw / max(n, 1)

    def frame(self, title: str, ylabel: str, xlabel: str = "area budget") -> List[str]:
        out = [
            f'<rect x="{LEFT}" y="{TOP}" width="{self.pw}" height="{self.ph}" fill="none" stroke="#333"/>',
            f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
            f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle" font-size="12">'
            f'{escape(xlabel)}{" (log scale)" if self.log_x else ""}</text>',
            f'<text x="16" y="{TOP + self.ph / 2}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 16 {TOP + self.ph / 2})">{escape(ylabel)}</text>',
        ]
        for i in range(5):
            v = self.y_lo + (self.y_hi - self.y_lo) * i / 4
            yy = _fmt(self.y(v))
            out.append(f'<line x1="{LEFT - 4}" y1="{yy}" x2="{LEFT}" y2="{yy}" stroke="#333"/>')
            out.append(f'<text x="{LEFT - 6}" y="{yy}" text-anchor="end" font-size="10" '
                       f'dominant-baseline="middle">{_tick_label(v)}</text>')
        if self.log_x:
            ticks = [10 ** k for k in range(math.ceil(self.x_lo - 1e-9), math.floor(self.x_hi + 1e-9) + 1)]
        else:
            ticks = [self.budgets[0] + (self.budgets[-1] - self.budgets[0]) * i / 4 for i in range(5)]
        for t in ticks:
            xx = _fmt(self.x(t))
            base = TOP + self.ph
            out.append(f'<line x1="{xx}" y1="{base}" x2="{xx}" y2="{base + 4}" stroke="#333"/>')
            out.append(f'<text x="{xx}" y="{base + 16}" text-anchor="middle" font-size="10">{_tick_label(t)}</text>')
        return out


def _document(body: List[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _legend(labels, colors) -> List[str]:
    out = []
    for i, (label, color) in enumerate(zip(labels, colors)):
        x = LEFT + 10 + 90 * i
        out.append(f'<rect x="{x}" y="{TOP + 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{x + 14}" y="{TOP + 17}" font-size="11">{escape(label)}</text>')
    return out


def delay_chart(rows: Sequence[SweepRow], title: str = "Average memory delay vs. area") -> str:
    """Delay polyline; a run of infeasible budgets breaks the line."""
    ok = [r for r in rows if r.feasible]
    y_max = max((r.delay for r in ok), default=1.0) * 1.05
    ax = _Axes([r.area_budget for r in rows], y_max)
    body = ax.frame(title, "average delay")
    segment: List[str] = []
    segments = []
    for r in rows:
        if r.feasible:
            segment.append(f"{_fmt(ax.x(r.area_budget))},{_fmt(ax.y(r.delay))}")
        elif segment:
            segments.append(segment)
            segment = []
    if segment:
        segments.append(segment)
    for seg in segments:
        body.append(f'<polyline points="{" ".join(seg)}" fill="none" stroke="#555" stroke-width="1.5"/>')
    for r in ok:
        body.append(f'<circle cx="{_fmt(ax.x(r.area_budget))}" cy="{_fmt(ax.y(r.delay))}" r="4" '
                    f'fill="{DEPTH_COLORS[r.winner_depth]}"><title>depth {r.winner_depth}</title></circle>')
    body += _legend(["1 level", "2 levels", "3 levels"], [DEPTH_COLORS[d] for d in (1, 2, 3)])
    return _document(body)


def _stacked(rows, values_of, y_max, title, ylabel) -> str:
    ax = _Axes([r.area_budget for r in rows], y_max)
    body = ax.frame(title, ylabel)
    w = ax.slot()
    for r in rows:
        if not r.feasible:
            continue
        base = 0.0
        x0 = ax.x(r.area_budget) - w / 2
        for level, v in enumerate(values_of(r)):
            top = base + v
            y_top, y_base = ax.y(top), ax.y(base)
            body.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y_top)}" width="{_fmt(w)}" '
                        f'height="{_fmt(y_base - y_top)}" fill="{LEVEL_COLORS[level]}"/>')
            base = top
    body += _legend(["L1", "L2", "L3"], LEVEL_COLORS)
    return _document(body)


def area_fraction_chart(rows: Sequence[SweepRow], title: str = "Fraction of area vs. area") -> str:
    return _stacked(rows, lambda r: r.fractions, 1.0, title, "fraction of area")


def layer_chart(rows: Sequence[SweepRow], total_layers: int = 16,
                title: str = "Layer allocation vs. area") -> str:
    return _stacked(rows, lambda r: r.layers, float(total_layers), title, f"layers (of {total_layers})")


def write_charts(out_dir, rows: Sequence[SweepRow], total_layers: int = 16) -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "delay_vs_area.svg": delay_chart(rows),
        "area_fractions.svg": area_fraction_chart(rows),
        "layer_allocation.svg": layer_chart(rows, total_layers),
    }
    paths = []
    for name, text in files.items():
        p = out_dir / name
        p.write_text(text)
        paths.append(p)
    return paths

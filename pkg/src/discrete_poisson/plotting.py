"""Minimal deterministic SVG line plots and CSV tables."""
from __future__ import annotations

import csv
import io as _io
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
           "#7f7f7f", "#bcbd22"]


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    dashed: bool = False
    markers: bool = False
    color: str | None = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError(f"series {self.label!r}: x and y must be 1-D of equal length")


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)


def nice_ticks(lo: float, hi: float, target: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = np.arange(first, hi + 1e-9 * step, step)
    return np.round(ticks / step) * step


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    s = f"{v:.4g}"
    return "0" if s in ("-0", "0") else s


def _limits(series: list[Series]) -> tuple[float, float, float, float]:
    xs = np.concatenate([s.x[np.isfinite(s.x) & np.isfinite(s.y)] for s in series])
    ys = np.concatenate([s.y[np.isfinite(s.x) & np.isfinite(s.y)] for s in series])
    if xs.size == 0:
        raise ValueError("no finite data points to plot")
    x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    return float(x0), float(x1), float(y0 - pad), float(y1 + pad)


def _path(sx: np.ndarray, sy: np.ndarray) -> str:
    parts, pen_down = [], False
    for x, y in zip(sx, sy):
        if not (np.isfinite(x) and np.isfinite(y)):
            pen_down = False
            continue
        parts.append(f"{'L' if pen_down else 'M'}{_fmt(x)} {_fmt(y)}")
        pen_down = True
    return " ".join(parts)


def _panel_svg(panel: Panel, ox: float, width: float, height: float) -> list[str]:
    left, right, top, bottom = 60.0, 15.0, 30.0, 45.0
    pw, ph = width - left - right, height - top - bottom
    x0, x1, y0, y1 = _limits(panel.series)

    def px(v):
        return ox + left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<g class="panel">',
           f'<rect x="{_fmt(ox + left)}" y="{_fmt(top)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
           f'fill="none" stroke="#000" stroke-width="1"/>',
           f'<text x="{_fmt(ox + left + pw / 2)}" y="{_fmt(top - 10)}" text-anchor="middle" '
           f'font-size="13">{escape(panel.title)}</text>',
           f'<text x="{_fmt(ox + left + pw / 2)}" y="{_fmt(height - 8)}" text-anchor="middle" '
           f'font-size="12">{escape(panel.xlabel)}</text>',
           f'<text x="{_fmt(ox + 14)}" y="{_fmt(top + ph / 2)}" text-anchor="middle" font-size="12" '
           f'transform="rotate(-90 {_fmt(ox + 14)} {_fmt(top + ph / 2)})">{escape(panel.ylabel)}</text>']
    for v in nice_ticks(x0, x1):
        if x0 - 1e-12 <= v <= x1 + 1e-12:
            out.append(f'<line x1="{_fmt(px(v))}" y1="{_fmt(top + ph)}" x2="{_fmt(px(v))}" '
                       f'y2="{_fmt(top + ph + 4)}" stroke="#000"/>')
            out.append(f'<text x="{_fmt(px(v))}" y="{_fmt(top + ph + 16)}" text-anchor="middle" '
                       f'font-size="10">{_label(v)}</text>')
    for v in nice_ticks(y0, y1):
        if y0 - 1e-12 <= v <= y1 + 1e-12:
            out.append(f'<line x1="{_fmt(ox + left - 4)}" y1="{_fmt(py(v))}" x2="{_fmt(ox + left)}" '
                       f'y2="{_fmt(py(v))}" stroke="#000"/>')
            out.append(f'<text x="{_fmt(ox + left - 6)}" y="{_fmt(py(v) + 3)}" text-anchor="end" '
                       f'font-size="10">{_label(v)}</text>')
    for k, s in enumerate(panel.series):
        color = s.color or PALETTE[k % len(PALETTE)]
        dash = ' stroke-dasharray="5 3"' if s.dashed else ""
        out.append(f'<path class="series" d="{_path(px(s.x), py(s.y))}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"{dash}/>')
        if s.markers:
            for x, y in zip(px(s.x), py(s.y)):
                if np.isfinite(x) and np.isfinite(y):
                    out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" fill="{color}"/>')
        ly = top + 12 + 14 * k
        lx = ox + left + pw - 110
        out.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(ly)}" x2="{_fmt(lx + 18)}" y2="{_fmt(ly)}" '
                   f'stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{_fmt(lx + 22)}" y="{_fmt(ly + 3)}" font-size="10">{escape(s.label)}</text>')
    out.append("</g>")
    return out


def render_svg(panels: list[Panel], panel_width: float = 380.0, height: float = 320.0) -> str:
    """Standalone SVG with the panels side by side."""
    if not panels or any(not p.series for p in panels):
        raise ValueError("every panel needs at least one series")
    width = panel_width * len(panels)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
             f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" font-family="sans-serif">',
             f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#fff"/>']
    for i, panel in enumerate(panels):
        lines += _panel_svg(panel, i * panel_width, panel_width, height)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_svg(panels: list[Panel], path=None, **style) -> str:
    """Render ``panels``; write to ``path`` when given. Returns the SVG text."""
    from .io import atomic_write

    text = render_svg(panels, **style)
    if path is not None:
        atomic_write(path, text)
    return text


def csv_text(header: list[str], rows) -> str:
    """CSV with a header row; floats use the shortest round-trip representation."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()

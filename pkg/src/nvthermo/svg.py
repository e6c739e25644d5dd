"""Minimal standalone SVG line/scatter plots with axes and labels."""

from dataclasses import dataclass, field
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f4e79", "#c0392b", "#27864a", "#8e44ad", "#d68910", "#555555")


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    style: str = "line"  # "line", "markers" or "stem"
    yerr: np.ndarray = None
    color: str = None


@dataclass
class Figure:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    width: int = 640
    height: int = 420
    series: list = field(default_factory=list)

    def add(self, x, y, label="", style="line", yerr=None, color=None):
        self.series.append(
            Series(np.asarray(x, float), np.asarray(y, float), label, style,
                   None if yerr is None else np.asarray(yerr, float), color)
        )
        return self

    def to_svg(self):
        return render(self)

    def save(self, path):
        text = render(self)
        Path(path).write_text(text, encoding="utf-8")
        return text


def nice_ticks(lo, hi, target=5):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0]
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + step * 1e-9:
        ticks.append(0.0 if abs(v) < step * 1e-12 else v)
        v += step
    return ticks


def _fmt_tick(v):
    return f"{v:.4g}"


def render(fig):
    left, right, top, bottom = 78, 20, 36, 56
    W, H = fig.width, fig.height
    pw, ph = W - left - right, H - top - bottom

    xs = [s.x for s in fig.series if s.x.size]
    ys = []
    for s in fig.series:
        if s.y.size:
            ys.append(s.y)
            if s.yerr is not None:
                ys.extend([s.y - s.yerr, s.y + s.yerr])
        if s.style == "stem":
            ys.append(np.zeros(1))
    x_all = np.concatenate(xs) if xs else np.array([0.0, 1.0])
    y_all = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    x_all = x_all[np.isfinite(x_all)]
    y_all = y_all[np.isfinite(y_all)]
    x0, x1 = (float(x_all.min()), float(x_all.max())) if x_all.size else (0.0, 1.0)
    y0, y1 = (float(y_all.min()), float(y_all.max())) if y_all.size else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        pad = abs(y0) * 0.05 or 1.0
        y0, y1 = y0 - pad, y1 + pad
    ypad = 0.05 * (y1 - y0)
    y0, y1 = y0 - ypad, y1 + ypad

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in nice_ticks(x0, x1):
        if x0 <= t <= x1:
            px = sx(t)
            out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" text-anchor="middle">{_fmt_tick(t)}</text>')
    for t in nice_ticks(y0, y1):
        if y0 <= t <= y1:
            py = sy(t)
            out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end">{_fmt_tick(t)}</text>')
    if fig.title:
        out.append(f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(fig.title)}</text>')
    if fig.xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 14}" text-anchor="middle">{escape(fig.xlabel)}</text>')
    if fig.ylabel:
        cx, cy = 16, top + ph / 2
        out.append(
            f'<text x="{cx}" y="{cy:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 {cx} {cy:.1f})">{escape(fig.ylabel)}</text>'
        )

    for k, s in enumerate(fig.series):
        color = s.color or PALETTE[k % len(PALETTE)]
        ok = np.isfinite(s.x) & np.isfinite(s.y)
        px, py = sx(s.x[ok]), sy(s.y[ok])
        if s.style == "line" and px.size:
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        elif s.style == "stem":
            base = sy(0.0)
            for a, b in zip(px, py):
                out.append(f'<line x1="{a:.2f}" y1="{base:.2f}" x2="{a:.2f}" y2="{b:.2f}" stroke="{color}"/>')
        else:
            if s.yerr is not None:
                for a, yv, e in zip(px, s.y[ok], s.yerr[ok]):
                    out.append(
                        f'<line x1="{a:.2f}" y1="{sy(yv - e):.2f}" x2="{a:.2f}" y2="{sy(yv + e):.2f}" stroke="{color}"/>'
                    )
            for a, b in zip(px, py):
                out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{color}"/>')
        if s.label:
            ly = top + 14 + 16 * k
            out.append(f'<line x1="{left + pw - 120}" y1="{ly - 4}" x2="{left + pw - 100}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{left + pw - 95}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

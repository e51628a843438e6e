"""Minimal deterministic SVG line charts.

Writes standalone SVG 1.1 documents with no external references, so the
figures render identically anywhere and diff cleanly between runs: byte
output depends only on the data passed in. Just enough charting for risk
curves: multiple series, linear or log axes, ticks, legend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

__all__ = ["Series", "line_chart"]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_DASHES = ["", "7,4", "2,3", "9,3,2,3"]


@dataclass(frozen=True)
class Series:
    xs: Sequence[float]
    ys: Sequence[float]
    label: str

    def __post_init__(self):
        if len(self.xs) != len(self.ys):
            raise ValueError("xs and ys must have equal length")
        if len(self.xs) == 0:
            raise ValueError("series must contain at least one point")


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _tick_label(v: float) -> str:
    if v != 0.0 and (abs(v) >= 1e5 or abs(v) < 1e-4):
        return f"{v:.0e}".replace("e-0", "e-").replace("e+0", "e").replace("e+", "e")
    return f"{v:g}"


def _linear_ticks(lo: float, hi: float, target: int = 6) -> List[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target, 2)
    mag = 10.0 ** math.floor(math.log10(raw))
    res = raw / mag
    step = mag * (1.0 if res < 1.5 else 2.0 if res < 3.0 else 5.0 if res < 7.0 else 10.0)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float) -> List[float]:
    lo_e = math.floor(math.log10(lo) + 1e-12)
    hi_e = math.ceil(math.log10(hi) - 1e-12)
    decades = [10.0**e for e in range(lo_e, hi_e + 1)]
    ticks = [t for t in decades if lo / 1.0001 <= t <= hi * 1.0001]
    if len(ticks) <= 2:
        ticks = sorted(
            t
            for d in decades
            for t in (d, 2.0 * d, 5.0 * d)
            if lo / 1.0001 <= t <= hi * 1.0001
        )
    return ticks


def _data_range(series: Sequence[Series], axis: str, log: bool) -> Tuple[float, float]:
    vals = [
        v
        for s in series
        for v in (s.xs if axis == "x" else s.ys)
        if math.isfinite(v) and (not log or v > 0.0)
    ]
    if not vals:
        raise ValueError(f"no plottable {axis} values (log axis drops non-positives)")
    lo, hi = min(vals), max(vals)
    if log:
        if hi == lo:
            lo, hi = lo / 2.0, hi * 2.0
        return lo, hi
    if hi == lo:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.5
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def line_chart(
    series: Sequence[Series],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 720,
    height: int = 480,
    x_log: bool = False,
    y_log: bool = False,
) -> str:
    """Render the series to an SVG document string."""
    if not series:
        raise ValueError("need at least one series")
    ml, mr, mt, mb = 64.0, 16.0, 30.0, 46.0
    pw, ph = width - ml - mr, height - mt - mb
    x_lo, x_hi = _data_range(series, "x", x_log)
    y_lo, y_hi = _data_range(series, "y", y_log)

    def sx(v: float) -> float:
        if x_log:
            return ml + pw * (math.log10(v) - math.log10(x_lo)) / (
                math.log10(x_hi) - math.log10(x_lo)
            )
        return ml + pw * (v - x_lo) / (x_hi - x_lo)

    def sy(v: float) -> float:
        if y_log:
            frac = (math.log10(v) - math.log10(y_lo)) / (
                math.log10(y_hi) - math.log10(y_lo)
            )
        else:
            frac = (v - y_lo) / (y_hi - y_lo)
        return mt + ph * (1.0 - frac)

    out: List[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    out.append(
        f'<rect x="{_fmt(ml)}" y="{_fmt(mt)}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>'
    )
    if title:
        out.append(
            f'<text x="{_fmt(ml + pw / 2)}" y="19" font-family="sans-serif" '
            f'font-size="14" text-anchor="middle" fill="#111111">{_escape(title)}</text>'
        )

    x_ticks = _log_ticks(x_lo, x_hi) if x_log else _linear_ticks(x_lo, x_hi)
    y_ticks = _log_ticks(y_lo, y_hi) if y_log else _linear_ticks(y_lo, y_hi)
    for t in x_ticks:
        px = sx(t)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(mt)}" x2="{_fmt(px)}" y2="{_fmt(mt + ph)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{_fmt(mt + ph + 16)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle" fill="#333333">{_tick_label(t)}</text>'
        )
    for t in y_ticks:
        py = sy(t)
        out.append(
            f'<line x1="{_fmt(ml)}" y1="{_fmt(py)}" x2="{_fmt(ml + pw)}" y2="{_fmt(py)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(ml - 6)}" y="{_fmt(py + 4)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end" fill="#333333">{_tick_label(t)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{_fmt(ml + pw / 2)}" y="{_fmt(height - 10)}" font-family="sans-serif" '
            f'font-size="12" text-anchor="middle" fill="#111111">{_escape(xlabel)}</text>'
        )
    if ylabel:
        cx, cy = 15.0, mt + ph / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-family="sans-serif" font-size="12" '
            f'text-anchor="middle" fill="#111111" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{_escape(ylabel)}</text>'
        )

    for k, s in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        dash = _DASHES[(k // len(_PALETTE)) % len(_DASHES)]
        pts = [
            (sx(x), sy(y))
            for x, y in zip(s.xs, s.ys)
            if math.isfinite(x)
            and math.isfinite(y)
            and (not x_log or x > 0.0)
            and (not y_log or y > 0.0)
        ]
        if not pts:
            continue
        coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.8"{dash_attr}/>'
        )

    lg_x, lg_y = ml + pw - 10.0, mt + 10.0
    entry_h = 17.0
    lg_w = 12 + 8 + max(len(s.label) for s in series) * 6.6 + 10
    out.append(
        f'<rect x="{_fmt(lg_x - lg_w)}" y="{_fmt(lg_y)}" width="{_fmt(lg_w)}" '
        f'height="{_fmt(entry_h * len(series) + 8)}" fill="#ffffff" '
        f'fill-opacity="0.85" stroke="#bbbbbb" stroke-width="0.8"/>'
    )
    for k, s in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        dash = _DASHES[(k // len(_PALETTE)) % len(_DASHES)]
        ey = lg_y + 8 + entry_h * k + 6
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line x1="{_fmt(lg_x - lg_w + 6)}" y1="{_fmt(ey)}" '
            f'x2="{_fmt(lg_x - lg_w + 24)}" y2="{_fmt(ey)}" stroke="{color}" '
            f'stroke-width="1.8"{dash_attr}/>'
        )
        out.append(
            f'<text x="{_fmt(lg_x - lg_w + 29)}" y="{_fmt(ey + 4)}" '
            f'font-family="sans-serif" font-size="11" fill="#111111">{_escape(s.label)}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )

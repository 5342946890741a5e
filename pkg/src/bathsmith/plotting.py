"""Minimal SVG line plots for CLI output (no plotting dependencies)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

_W, _H = 720, 440
_ML, _MR, _MT, _MB = 70, 20, 20, 50


def _ticks(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + step / 2, step)


def write_line_svg(path, x, ys, xlabel: str, ylabel: str, labels=None) -> None:
    """Polyline plot of one or more series sharing the x axis."""
    x = np.asarray(x, dtype=float)
    series = [np.asarray(y, dtype=float) for y in ys]
    lo_x, hi_x = float(x.min()), float(x.max())
    lo_y = min(float(y.min()) for y in series)
    hi_y = max(float(y.max()) for y in series)
    if hi_y == lo_y:
        hi_y = lo_y + 1.0
    pad = 0.05 * (hi_y - lo_y)
    lo_y -= pad
    hi_y += pad

    def px(v):
        return _ML + (v - lo_x) / (hi_x - lo_x) * (_W - _ML - _MR)

    def py(v):
        return _H - _MB - (v - lo_y) / (hi_y - lo_y) * (_H - _MT - _MB)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W-_ML-_MR}" height="{_H-_MT-_MB}" '
        'fill="none" stroke="#333"/>',
    ]
    for tx in _ticks(lo_x, hi_x):
        out.append(
            f'<line x1="{px(tx):.1f}" y1="{_H-_MB}" x2="{px(tx):.1f}" y2="{_H-_MB+5}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{px(tx):.1f}" y="{_H-_MB+18}" text-anchor="middle">{tx:g}</text>'
        )
    for ty in _ticks(lo_y, hi_y):
        out.append(
            f'<line x1="{_ML-5}" y1="{py(ty):.1f}" x2="{_ML}" y2="{py(ty):.1f}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{_ML-8}" y="{py(ty)+4:.1f}" text-anchor="end">{ty:.3g}</text>'
        )
    out.append(
        f'<text x="{(_ML+_W-_MR)/2}" y="{_H-12}" text-anchor="middle">{xlabel}</text>'
    )
    out.append(
        f'<text x="16" y="{(_MT+_H-_MB)/2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(_MT+_H-_MB)/2})">{ylabel}</text>'
    )
    for i, y in enumerate(series):
        pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(x, y))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{colors[i % len(colors)]}" stroke-width="1.2"/>'
        )
        if labels:
            out.append(
                f'<text x="{_W-_MR-8}" y="{_MT+16+14*i}" text-anchor="end" '
                f'fill="{colors[i % len(colors)]}">{labels[i]}</text>'
            )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", newline="\n")

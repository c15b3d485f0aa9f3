"""Minimal deterministic SVG writers (no timestamps, fixed formatting).

CSV files are the data contract; these plots are a convenience for quick
inspection only.
"""

from __future__ import annotations

import numpy as np


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _diverging_color(v: float) -> str:
    """Blue-white-red map for v in [-1, 1]."""
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        r, g, b = 255, int(255 * (1 - v)), int(255 * (1 - v))
    else:
        r, g, b = int(255 * (1 + v)), int(255 * (1 + v)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_heatmap(values: np.ndarray, path: str, width: int = 640, height: int = 480, title: str = "") -> None:
    """Symmetric diverging heatmap of a 2D array, rows along y."""
    vals = np.asarray(values, dtype=float)
    vmax = float(np.abs(vals).max()) or 1.0
    ny, nx = vals.shape
    cw, ch = width / nx, height / ny
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height + 20}">',
        f'<text x="4" y="14" font-size="12" font-family="monospace">{title}</text>',
    ]
    for i in range(ny):
        for j in range(nx):
            color = _diverging_color(vals[i, j] / vmax)
            x = _fmt(j * cw)
            y = _fmt(20 + (ny - 1 - i) * ch)
            parts.append(
                f'<rect x="{x}" y="{y}" width="{_fmt(cw + 0.5)}" height="{_fmt(ch + 0.5)}" fill="{color}"/>'
            )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def svg_lines(x: np.ndarray, series: dict[str, np.ndarray], path: str, width: int = 640, height: int = 480, title: str = "") -> None:
    """Simple multi-series line plot with auto scaling."""
    x = np.asarray(x, dtype=float)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
    ys = np.concatenate([np.asarray(v, dtype=float) for v in series.values()])
    finite = ys[np.isfinite(ys)]
    ylo, yhi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if yhi == ylo:
        yhi = ylo + 1.0
    xlo, xhi = float(x.min()), float(x.max())
    if xhi == xlo:
        xhi = xlo + 1.0
    m = 40

    def sx(v: float) -> float:
        return m + (v - xlo) / (xhi - xlo) * (width - 2 * m)

    def sy(v: float) -> float:
        return height - m - (v - ylo) / (yhi - ylo) * (height - 2 * m)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="4" y="14" font-size="12" font-family="monospace">{title}</text>',
        f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" fill="none" stroke="#888"/>',
    ]
    for idx, (name, yv) in enumerate(series.items()):
        yv = np.asarray(yv, dtype=float)
        pts = " ".join(
            f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(x, yv) if np.isfinite(b)
        )
        color = colors[idx % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{m + 4}" y="{m + 14 + 14 * idx}" font-size="11" fill="{color}" font-family="monospace">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")

"""Minimal SVG line plots of curves over one full turn."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def curves_svg(thetas, curves: dict[str, np.ndarray], title: str = "", width: int = 800, height: int = 400) -> str:
    """One polyline per curve inside a viewBox spanning ``[0, 2pi] x [min, max]``.

    The plot area is a nested ``<svg>`` whose viewBox uses data coordinates
    (y negated so values grow upward); legend and title live outside it in
    pixel coordinates.
    """
    thetas = np.asarray(thetas, dtype=float)
    stacked = np.concatenate([np.asarray(v, dtype=float) for v in curves.values()]) if curves else np.zeros(1)
    lo, hi = float(stacked.min()), float(stacked.max())
    if hi - lo <= 1e-300:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    two_pi = 2.0 * math.pi
    plot_w, plot_h = width - 160, height - 60

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<text x="10" y="20" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<svg x="10" y="40" width="{plot_w}" height="{plot_h}" '
        f'viewBox="0 {-hi!r} {two_pi!r} {span!r}" preserveAspectRatio="none">',
        f'<rect x="0" y="{-hi!r}" width="{two_pi!r}" height="{span!r}" fill="none" stroke="#999" '
        'vector-effect="non-scaling-stroke"/>',
    ]
    if lo < 0 < hi:
        parts.append(
            f'<line x1="0" y1="0" x2="{two_pi!r}" y2="0" stroke="#ccc" vector-effect="non-scaling-stroke"/>'
        )
    for (name, values), color in zip(curves.items(), COLORS * 4):
        pts = " ".join(f"{t!r},{-float(v)!r}" for t, v in zip(thetas, np.asarray(values, dtype=float)))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'vector-effect="non-scaling-stroke" points="{pts}"><title>{escape(name)}</title></polyline>'
        )
    parts.append("</svg>")
    for i, ((name, _), color) in enumerate(zip(curves.items(), COLORS * 4)):
        y = 50 + 20 * i
        parts.append(f'<line x1="{plot_w + 20}" y1="{y}" x2="{plot_w + 45}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        parts.append(
            f'<text x="{plot_w + 50}" y="{y + 4}" font-family="sans-serif" font-size="12">{escape(name)}</text>'
        )
    parts.append(
        f'<text x="10" y="{height - 8}" font-family="sans-serif" font-size="11">'
        f"theta in [0, 2pi]; values in [{lo:.6g}, {hi:.6g}]</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

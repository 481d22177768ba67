"""Self-contained, deterministic SVG histogram plots.

Hand-rolled on purpose: plotting libraries embed timestamps and generated
ids in their SVG output, which breaks the byte-identical report contract.
"""

from __future__ import annotations

from .stats import Histogram

_W, _H = 640, 400
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 60, 20, 40, 50


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def histogram_svg(hist: Histogram, title: str = "", x_label: str = "") -> str:
    """Render a histogram as a standalone SVG document string."""
    edges = hist.bin_edges
    counts = hist.counts
    x_lo, x_hi = float(edges[0]), float(edges[-1])
    y_hi = max(1, int(counts.max()))
    plot_w = _W - _MARGIN_L - _MARGIN_R
    plot_h = _H - _MARGIN_T - _MARGIN_B

    def sx(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return _MARGIN_T + plot_h - y / y_hi * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]
    for i, count in enumerate(counts):
        if count == 0:
            continue
        x0, x1 = sx(edges[i]), sx(edges[i + 1])
        y = sy(count)
        parts.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(y)}" width="{_fmt(x1 - x0)}" '
            f'height="{_fmt(sy(0) - y)}" fill="#4878a8" stroke="white" '
            'stroke-width="0.5"/>'
        )
    # axes
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{_fmt(sy(0))}" x2="{_W - _MARGIN_R}" '
        f'y2="{_fmt(sy(0))}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_fmt(sy(0))}" stroke="black"/>'
    )
    # ticks: ends plus midpoint on x, max on y
    for xv in (x_lo, (x_lo + x_hi) / 2.0, x_hi):
        parts.append(
            f'<text x="{_fmt(sx(xv))}" y="{_H - _MARGIN_B + 18}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f'{_fmt(xv)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L - 6}" y="{_MARGIN_T + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y_hi}</text>'
    )
    parts.append(
        f'<text x="{_MARGIN_L - 6}" y="{_fmt(sy(0) + 4)}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">0</text>'
    )
    if x_label:
        parts.append(
            f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{x_label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""Minimal SVG line plot of a witness sweep."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = 50


def witness_svg(s: Sequence[float], w: Sequence[float], crossings: Sequence[float] = (),
                title: str = "Entanglement witness") -> str:
    """W against s with a red W=1 reference line and green verticals at crossings."""
    s_lo, s_hi = (min(s), max(s)) if s else (0.0, 1.0)
    if s_hi == s_lo:
        s_lo, s_hi = s_lo - 0.5, s_hi + 0.5
    w_hi = max(2.0, max(w, default=0.0))
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def px(x):
        return MARGIN + (x - s_lo) / (s_hi - s_lo) * pw

    def py(y):
        return HEIGHT - MARGIN - y / w_hi * ph

    axis = [f"M{MARGIN},{MARGIN}V{HEIGHT - MARGIN}H{WIDTH - MARGIN}"]
    labels = []
    for i in range(6):
        x = s_lo + (s_hi - s_lo) * i / 5
        axis.append(f"M{px(x):.2f},{HEIGHT - MARGIN}v5")
        labels.append(f'<text x="{px(x):.2f}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle">{x:.3g}</text>')
    for i in range(5):
        y = w_hi * i / 4
        axis.append(f"M{MARGIN},{py(y):.2f}h-5")
        labels.append(f'<text x="{MARGIN - 8}" y="{py(y) + 4:.2f}" text-anchor="end">{y:.3g}</text>')
    points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s, w))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'font-family="sans-serif" font-size="11">',
        f"<title>{escape(title)}</title>",
        f'<path class="axes" d="{"".join(axis)}" stroke="black" fill="none"/>',
        *labels,
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle">dphi_LR + dphi_RL (rad)</text>',
        f'<text x="14" y="{HEIGHT / 2}" transform="rotate(-90 14 {HEIGHT / 2})" text-anchor="middle">W</text>',
        f'<polyline class="witness" points="{points}" stroke="blue" fill="none"/>',
        f'<line class="reference" x1="{MARGIN}" y1="{py(1.0):.2f}" x2="{WIDTH - MARGIN}" '
        f'y2="{py(1.0):.2f}" stroke="red"/>',
    ]
    for c in crossings:
        parts.append(
            f'<line class="crossing" x1="{px(c):.2f}" y1="{MARGIN}" x2="{px(c):.2f}" '
            f'y2="{HEIGHT - MARGIN}" stroke="green" stroke-dasharray="4 3"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

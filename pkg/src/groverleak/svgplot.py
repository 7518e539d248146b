"""Minimal SVG line/marker charts for time series."""

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555")


@dataclass
class Trace:
    label: str
    x: list
    y: list
    color: str = PALETTE[0]
    line: bool = True
    dash: str = ""
    marker: str = ""  # "", "filled" or "open"


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if raw <= m * mag)
    first = math.ceil(lo / step - 1e-9)
    last = math.floor(hi / step + 1e-9)
    return [round(k * step, 12) for k in range(first, last + 1)]


def line_chart(traces, title="", xlabel="", ylabel="", width=640, height=420, ylim=None):
    """Render traces to an SVG document string."""
    left, right, top, bottom = 64, 150, 36, 48
    pw, ph = width - left - right, height - top - bottom
    xs = [v for tr in traces for v in tr.x]
    ys = [v for tr in traces for v in tr.y]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = ylim if ylim else ((min(ys), max(ys)) if ys else (0.0, 1.0))
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _nice_ticks(x0, x1):
        out.append(f'<line x1="{sx(v):.2f}" y1="{top + ph}" x2="{sx(v):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(v):.2f}" y="{top + ph + 18}" text-anchor="middle">{v:g}</text>')
    for v in _nice_ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(v):.2f}" x2="{left}" y2="{sy(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(v) + 4:.2f}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    out.append(f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>')
    for tr in traces:
        pts = [(sx(a), sy(b)) for a, b in zip(tr.x, tr.y)]
        if tr.line and pts:
            d = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
            dash = f' stroke-dasharray="{tr.dash}"' if tr.dash else ""
            out.append(
                f'<polyline points="{d}" fill="none" stroke="{tr.color}" stroke-width="1.5"{dash} clip-path="url(#plot)"/>'
            )
        if tr.marker:
            fill = tr.color if tr.marker == "filled" else "white"
            for a, b in pts:
                out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="{fill}" stroke="{tr.color}" clip-path="url(#plot)"/>')
    for i, tr in enumerate(traces):
        y = top + 12 + 18 * i
        lx = left + pw + 10
        dash = f' stroke-dasharray="{tr.dash}"' if tr.dash else ""
        if tr.line:
            out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 22}" y2="{y}" stroke="{tr.color}" stroke-width="1.5"{dash}/>')
        if tr.marker:
            fill = tr.color if tr.marker == "filled" else "white"
            out.append(f'<circle cx="{lx + 11}" cy="{y}" r="2.5" fill="{fill}" stroke="{tr.color}"/>')
        out.append(f'<text x="{lx + 28}" y="{y + 4}">{escape(tr.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

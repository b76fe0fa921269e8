"""Dependency-free SVG line chart for trajectories."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

SERIES = ("p", "v1", "v2", "s1", "s2", "s3")
COLORS = {
    "p": "#ff0000",
    "v1": "#00a000",
    "v2": "#0000ff",
    "s1": "#e0c000",
    "s2": "#40e0d0",
    "s3": "#ff00ff",
}
DASHES = ("", "6,4", "2,3", "10,3,2,3")


@dataclass(frozen=True)
class ChartSpec:
    series: tuple = SERIES
    tau_range: tuple = (0.0, 2.0)
    y_range: tuple = (0.0, 1.0)
    width: int = 800
    height: int = 500
    title: str = "Trajectory"
    max_points: int = 2000


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _thin(rows: Sequence, limit: int) -> list:
    if len(rows) <= limit:
        return list(rows)
    stride = -(-len(rows) // limit)
    out = list(rows[::stride])
    if out[-1] is not rows[-1]:
        out.append(rows[-1])
    return out


def emit_chart(row_sets, path, spec: ChartSpec = ChartSpec(), labels: Sequence[str] = ()) -> None:
    """Write an SVG 1.1 chart; each row set gets its own dash style, each column its fixed colour.

    Rows are anything indexable as (tau, p, v1, v2, s1, s2, s3). Output bytes
    depend only on the inputs.
    """
    if not row_sets or any(len(rows) == 0 for rows in row_sets):
        raise ValueError("every row set must be nonempty")
    for rows in row_sets:
        if any(b[0] < a[0] for a, b in zip(rows, rows[1:])):
            raise ValueError("tau must be nondecreasing")

    W, H = spec.width, spec.height
    left, right, top, bottom = 60, W - 120, 40, H - 50
    x0, x1 = spec.tau_range
    y0, y1 = spec.y_range

    def px(tau):
        return left + (tau - x0) / (x1 - x0) * (right - left)

    def py(y):
        return bottom - (y - y0) / (y1 - y0) * (bottom - top)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
        f'<text x="{W / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{_escape(spec.title)}</text>',
        f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}"/></clipPath>',
    ]
    for i in range(5):
        tau = x0 + (x1 - x0) * i / 4
        y = y0 + (y1 - y0) * i / 4
        out.append(f'<line x1="{px(tau):.2f}" y1="{top}" x2="{px(tau):.2f}" y2="{bottom}" stroke="#e0e0e0"/>')
        out.append(f'<line x1="{left}" y1="{py(y):.2f}" x2="{right}" y2="{py(y):.2f}" stroke="#e0e0e0"/>')
        out.append(f'<text x="{px(tau):.2f}" y="{bottom + 18}" text-anchor="middle" font-family="sans-serif" font-size="12">{tau:g}</text>')
        out.append(f'<text x="{left - 6}" y="{py(y) + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="12">{y:g}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" fill="none" stroke="#000000"/>')
    out.append(f'<text x="{(left + right) / 2:.1f}" y="{H - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">rounds / n</text>')

    for k, rows in enumerate(row_sets):
        rows = _thin(rows, spec.max_points)
        dash = DASHES[k % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        for name in spec.series:
            col = SERIES.index(name) + 1
            pts = " ".join(f"{px(r[0]):.2f},{py(r[col]):.2f}" for r in rows)
            color = COLORS[name]
            if len(rows) == 1:
                out.append(f'<circle cx="{px(rows[0][0]):.2f}" cy="{py(rows[0][col]):.2f}" r="2" fill="{color}" clip-path="url(#plot)"/>')
            else:
                out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} clip-path="url(#plot)" points="{pts}"/>')

    ly = top + 10
    for name in spec.series:
        out.append(f'<line x1="{right + 10}" y1="{ly}" x2="{right + 30}" y2="{ly}" stroke="{COLORS[name]}" stroke-width="2"/>')
        out.append(f'<text x="{right + 36}" y="{ly + 4}" font-family="sans-serif" font-size="12">{name}</text>')
        ly += 18
    for k, label in enumerate(labels):
        dash = DASHES[k % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<line x1="{right + 10}" y1="{ly}" x2="{right + 30}" y2="{ly}" stroke="#000000"{dash_attr}/>')
        out.append(f'<text x="{right + 36}" y="{ly + 4}" font-family="sans-serif" font-size="12">{_escape(label)}</text>')
        ly += 18
    out.append("</svg>")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")

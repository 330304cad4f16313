"""Deterministic SVG drawings of a mass and, optionally, a cover.

Pieces are drawn as annular sectors around their apex, one ring per piece in
winding order, so overlapping pieces stay readable. Pieces of the two orbits
of a doubled construction, or of the two families of a multi-apex cover, get
different palettes.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .mass import Mass
from .nonspiral import GeneralCover
from .spiral import Orbit, SpiralCover

SIZE = 600
PALETTES = {
    "a": ("#1f77b4", "#4c9ed9", "#0b4f80", "#7fb8e6"),
    "b": ("#d9541e", "#f08a4b", "#9c3a10", "#f5b38a"),
}


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _sector(cx, cy, r0, r1, start, sweep) -> str:
    end = start + sweep
    large = 1 if sweep > math.pi else 0
    p = lambda r, a: f"{_fmt(cx + r * math.cos(a))} {_fmt(cy + r * math.sin(a))}"
    return (
        f"M {p(r1, start)} A {_fmt(r1)} {_fmt(r1)} 0 {large} 1 {p(r1, end)} "
        f"L {p(r0, end)} A {_fmt(r0)} {_fmt(r0)} 0 {large} 0 {p(r0, start)} Z"
    )


def _groups(cover):
    """(palette key, pieces) per apex group, in drawing order."""
    if isinstance(cover, GeneralCover) and cover.families:
        return [("ab"[i % 2], list(f.pieces)) for i, f in enumerate(cover.families)]
    if isinstance(cover, SpiralCover):
        return [("b" if cover.orbit_tag is Orbit.EVEN else "a", list(cover.pieces))]
    by_apex: dict = {}
    for w in cover.pieces:
        by_apex.setdefault(tuple(w.apex), []).append(w)
    return [("ab"[i % 2], ws) for i, ws in enumerate(by_apex.values())]


def render_svg(mass: Mass, cover=None, size: int = SIZE) -> str:
    x0, y0, x1, y1 = mass.bounds
    pts = [np.array([[x0, y0], [x1, y1]])]
    if cover is not None:
        pts.append(np.array([list(w.apex) for w in cover.pieces]))
    allp = np.concatenate(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    pad = 0.15 * span
    lo, hi = lo - pad, hi + pad
    span = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    s = size / span
    # World y points up; the group transform flips it for SVG.
    tf = f"matrix({_fmt(s)} 0 0 {_fmt(-s)} {_fmt(-lo[0] * s)} {_fmt(hi[1] * s)})"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<g transform="{tf}">',
        '<g class="mass">',
    ]
    for part in mass.parts:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in part.vertices)
        out.append(
            f'<polygon class="mass-part" points="{coords}" fill="#888888" '
            f'fill-opacity="{_fmt(min(0.85, 0.15 + part.weight))}" stroke="#444444" vector-effect="non-scaling-stroke"/>'
        )
    out.append("</g>")
    if cover is not None:
        reach = 2 * span
        for key, pieces in _groups(cover):
            apex = pieces[0].apex
            cx, cy = apex
            dirs = sorted({round(a % (2 * math.pi), 12) for w in pieces for a in (w.start, w.end)})
            out.append(f'<g class="apex" data-apex="{_fmt(cx)},{_fmt(cy)}">')
            for a in dirs:
                out.append(
                    f'<line class="ray" x1="{_fmt(cx)}" y1="{_fmt(cy)}" x2="{_fmt(cx + reach * math.cos(a))}" '
                    f'y2="{_fmt(cy + reach * math.sin(a))}" stroke="#222222" stroke-dasharray="4 3" '
                    'vector-effect="non-scaling-stroke"/>'
                )
            r_base, dr = 0.08 * span, 0.025 * span
            for i, w in enumerate(pieces):
                color = PALETTES[key][i % len(PALETTES[key])]
                d = _sector(cx, cy, r_base + i * dr, r_base + (i + 0.8) * dr, w.start, w.sweep)
                out.append(
                    f'<path class="sector" d="{d}" fill="{color}" fill-opacity="0.7" stroke="none" '
                    f'data-start="{_fmt(w.start)}" data-sweep="{_fmt(w.sweep)}"/>'
                )
            out.append(
                f'<circle class="center" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(0.006 * span)}" fill="#000000"/>'
            )
            out.append("</g>")
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def save_svg(mass: Mass, path, cover=None) -> None:
    Path(path).write_text(render_svg(mass, cover))

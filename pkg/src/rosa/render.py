"""SVG output for patches.

Coordinates are rounded to six decimals and tiles are written in patch order
(sorted by anchor, then type), so identical input gives identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Patch, embed, tile_class

PALETTE = (
    "#2b4c7e",
    "#e0a458",
    "#8fb996",
    "#c8553d",
    "#6b4e71",
    "#f2d0a4",
    "#3a7d7c",
    "#b5838d",
    "#577590",
    "#f28482",
)


def _fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


@dataclass(frozen=True)
class RenderSpec:
    scale: float = 20.0
    stroke_width: float = 0.6
    stroke: str = "#222222"
    margin: float = 10.0
    palette: tuple[str, ...] = field(default=PALETTE)

    def fill(self, t: int) -> str:
        return self.palette[(t // 2) % len(self.palette)]


def tile_polygons(p: Patch) -> np.ndarray:
    """Embedded corners of every tile, shape (N, 4) complex."""
    return embed(p.vertex_array(), p.n) if len(p) else np.zeros((0, 4), dtype=complex)


def _frame(points: np.ndarray, spec: RenderSpec) -> tuple[float, float, float, float]:
    if points.size == 0:
        return 0.0, 0.0, 2 * spec.margin, 2 * spec.margin
    x = points.real * spec.scale
    y = -points.imag * spec.scale
    return float(x.min()) - spec.margin, float(y.min()) - spec.margin, float(np.ptp(x)) + 2 * spec.margin, float(np.ptp(y)) + 2 * spec.margin


def render_svg(p: Patch, spec: RenderSpec | None = None) -> str:
    """One polygon per tile, filled by rhombus angle class."""
    spec = spec or RenderSpec()
    polys = np.asarray(tile_polygons(p))
    x0, y0, w, h = _frame(polys, spec)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}" '
        f'width="{_fmt(w)}" height="{_fmt(h)}">',
        f'<g stroke="{spec.stroke}" stroke-width="{_fmt(spec.stroke_width)}" stroke-linejoin="round">',
    ]
    for corners, (j, k) in zip(polys, p.types.tolist()):
        pts = " ".join(f"{_fmt(z.real * spec.scale)},{_fmt(-z.imag * spec.scale)}" for z in corners)
        out.append(f'<polygon points="{pts}" fill="{spec.fill(tile_class(j, k, p.n))}"/>')
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


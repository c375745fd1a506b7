"""Hand-emitted SVG figures.

No plotting dependency: figures are built from the same arrays that were
written to the sibling CSV, mapped into pixel space with a flipped y-axis
and fixed decimal formatting, so identical data yields identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["SvgFigure"]

_STYLE = """\
  polyline { fill: none; stroke-width: 1.5; }
  .abnormal { stroke: #1a9641; }
  .hyperbolic { stroke: #d7191c; }
  .elliptic { stroke: #2b83ba; stroke-dasharray: 5 3; }
  .boundary { stroke: #888888; stroke-dasharray: 2 3; stroke-width: 1; }
  .sphere { stroke: #000000; stroke-width: 2; }
  .front { stroke: #2b83ba; stroke-dasharray: 5 3; }
  .scan { stroke: #d7191c; }
  .cut { stroke: #1a9641; stroke-width: 2; }
  .marker { fill: #1a9641; stroke: none; }
  .start { fill: #000000; stroke: none; }
"""


@dataclass
class _Layer:
    kind: str  # "polyline" | "points"
    cls: str
    data: np.ndarray


class SvgFigure:
    """Collects polylines and markers in data coordinates, renders to SVG text."""

    def __init__(self, width: int = 720, height: int = 540, margin: int = 24):
        self.width = int(width)
        self.height = int(height)
        self.margin = int(margin)
        self._layers: list[_Layer] = []

    def polyline(self, points, cls: str) -> None:
        pts = np.asarray(points, dtype=float)
        pts = pts[np.all(np.isfinite(pts), axis=1)]
        if pts.shape[0] >= 2:
            self._layers.append(_Layer("polyline", cls, pts))

    def points(self, points, cls: str) -> None:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        pts = pts[np.all(np.isfinite(pts), axis=1)]
        if pts.shape[0] >= 1:
            self._layers.append(_Layer("points", cls, pts))

    def _bbox(self):
        stacked = np.vstack([layer.data for layer in self._layers])
        lo = stacked.min(axis=0)
        hi = stacked.max(axis=0)
        span = np.maximum(hi - lo, 1e-9)
        return lo, span

    def render(self) -> str:
        if not self._layers:
            return (
                f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}"></svg>\n'
            )
        lo, span = self._bbox()
        inner_w = self.width - 2 * self.margin
        inner_h = self.height - 2 * self.margin
        scale = min(inner_w / span[0], inner_h / span[1])

        def to_px(pts: np.ndarray) -> np.ndarray:
            out = np.empty_like(pts)
            out[:, 0] = self.margin + (pts[:, 0] - lo[0]) * scale
            out[:, 1] = self.height - self.margin - (pts[:, 1] - lo[1]) * scale
            return out

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}">',
            f"<style>\n{_STYLE}</style>",
        ]
        for layer in self._layers:
            px = to_px(layer.data)
            if layer.kind == "polyline":
                coords = " ".join(f"{p[0]:.3f},{p[1]:.3f}" for p in px)
                parts.append(f'<polyline class="{layer.cls}" points="{coords}" />')
            else:
                for p in px:
                    parts.append(
                        f'<circle class="{layer.cls}" cx="{p[0]:.3f}" cy="{p[1]:.3f}" r="3" />'
                    )
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def strong_boundary_polylines(problem, bbox_lo, bbox_hi, n: int = 2) -> list[np.ndarray]:
    """Lines where the current norm equals 1, clipped to a bounding box.

    For the built-in families these are straight lines in chart coordinates
    (|y| = 1, or r = k for the vortex), so no sampling is involved.
    """
    lines: list[np.ndarray] = []
    x0, y0 = float(bbox_lo[0]), float(bbox_lo[1])
    x1, y1 = float(bbox_hi[0]), float(bbox_hi[1])
    if problem.family == "historical":
        for level in (-1.0, 1.0):
            if y0 - 0.2 <= level <= y1 + 0.2:
                lines.append(np.array([[x0, level], [x1, level]]))
    elif problem.family == "vortex":
        level = problem.k  # current_norm = k / r
        if x0 - 0.2 <= level <= x1 + 0.2:
            lines.append(np.array([[level, y0], [level, y1]]))
    elif problem.family == "powerlaw" and problem.k != 0.0:
        exponent = problem.a + problem.b
        if exponent != 0.0:
            level = abs(1.0 / problem.k) ** (1.0 / exponent)
            if math.isfinite(level) and x0 - 0.2 <= level <= x1 + 0.2:
                lines.append(np.array([[level, y0], [level, y1]]))
    return lines

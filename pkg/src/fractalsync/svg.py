"""Minimal SVG rendering of vertex fields, no plotting dependency.

Phase fields map to hue (full-saturation HSV); real fields to a fixed
blue-to-red gradient.  Ring graphs are laid out on a circle.
"""

from __future__ import annotations

import colorsys

import numpy as np

from .graphs import FractalGraph


def _layout(g: FractalGraph) -> np.ndarray:
    if g.kind == "ring":
        ang = 2.0 * np.pi * g.coords[:, 0]
        return np.stack([0.5 + 0.45 * np.cos(ang), 0.5 + 0.45 * np.sin(ang)], axis=1)
    pts = g.coords.copy()
    pts[:, 1] = pts[:, 1].max() - pts[:, 1]  # svg y grows downward
    span = max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]), 1e-9)
    return 0.05 + 0.9 * (pts - pts.min(axis=0)) / span


def _phase_color(t):
    r, g, b = colorsys.hsv_to_rgb(t % 1.0, 1.0, 1.0)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _real_color(t):
    lo = np.array([33, 102, 172])  # blue
    hi = np.array([178, 24, 43])   # red
    c = (lo + (hi - lo) * min(max(t, 0.0), 1.0)).astype(int)
    return f"#{c[0]:02x}{c[1]:02x}{c[2]:02x}"


def render_field_svg(g: FractalGraph, values, path, mode="phase", size=640) -> str:
    """Write an SVG with edges in grey and vertices coloured by value."""
    values = np.asarray(values, dtype=float)
    pts = _layout(g) * size
    radius = max(1.5, 0.35 * size / (2 ** g.level + 1))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for a, b in g.edges:
        lines.append(
            f'<line x1="{pts[a, 0]:.2f}" y1="{pts[a, 1]:.2f}" '
            f'x2="{pts[b, 0]:.2f}" y2="{pts[b, 1]:.2f}" '
            f'stroke="#cccccc" stroke-width="0.6"/>')
    if mode == "phase":
        colors = [_phase_color(v) for v in values]
    else:
        lo, hi = float(values.min()), float(values.max())
        scale = hi - lo if hi > lo else 1.0
        colors = [_real_color((v - lo) / scale) for v in values]
    for k in range(g.n_vertices):
        lines.append(
            f'<circle cx="{pts[k, 0]:.2f}" cy="{pts[k, 1]:.2f}" '
            f'r="{radius:.2f}" fill="{colors[k]}"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path

"""Deterministic SVG pictures of arrangements on a coordinate 2-plane.

Zero curves of each constraint are traced by marching squares on the value
grid; the domain (all constraints positive) is shaded cell-wise; t-values
get tick marks when the first plotted axis is x1; ellipsoid poles are
marked.  Output bytes depend only on the arrangement and the plot config.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .arrangement import Arrangement, _plane_coeff_matrix
from .errors import InputError
from .linalg import sqrt_fraction

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
]


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _marching_squares(vals: np.ndarray, us: np.ndarray, vs: np.ndarray) -> list:
    """Zero-level segments of a scalar grid (linear interpolation per cell)."""
    segments = []
    nu, nv = vals.shape

    def interp(p1, p2, f1, f2):
        t = f1 / (f1 - f2)
        return (p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]))

    for i in range(nu - 1):
        for j in range(nv - 1):
            f = [vals[i, j], vals[i + 1, j], vals[i + 1, j + 1], vals[i, j + 1]]
            corners = [
                (us[i], vs[j]),
                (us[i + 1], vs[j]),
                (us[i + 1], vs[j + 1]),
                (us[i], vs[j + 1]),
            ]
            idx = sum(1 << k for k in range(4) if f[k] > 0)
            if idx in (0, 15):
                continue
            crossings = []
            for k in range(4):
                a, b = k, (k + 1) % 4
                if (f[a] > 0) != (f[b] > 0) and f[a] != f[b]:
                    crossings.append(interp(corners[a], corners[b], f[a], f[b]))
            if len(crossings) == 2:
                segments.append((crossings[0], crossings[1]))
            elif len(crossings) == 4:
                # ambiguous saddle: connect in edge order deterministically
                segments.append((crossings[0], crossings[1]))
                segments.append((crossings[2], crossings[3]))
    return segments


def plot_arrangement(
    arr: Arrangement,
    plane: tuple[int, int] = (1, 2),
    grid_step: float = 0.05,
    viewport: tuple[float, float, float, float] | None = None,
    width: int = 800,
    height: int = 600,
) -> str:
    """Render the arrangement restricted to a coordinate plane as SVG text."""
    if len(plane) != 2 or plane[0] == plane[1]:
        raise InputError("plane must name two distinct coordinates")
    if not all(1 <= a <= arr.n for a in plane):
        raise InputError(f"plane coordinates out of range 1..{arr.n}")
    axes = (int(plane[0]), int(plane[1]))

    if viewport is None:
        if arr.t_values and axes[0] == 1:
            u_min = float(arr.t_values[0]) - 2.0
            u_max = float(arr.t_values[-1]) + 2.0
        else:
            u_min, u_max = -5.0, 5.0
        v_min, v_max = -4.0, 4.0
    else:
        u_min, u_max, v_min, v_max = (float(v) for v in viewport)
    if u_max <= u_min or v_max <= v_min:
        raise InputError("viewport must have positive extent")

    us = np.arange(u_min, u_max + grid_step / 2, grid_step)
    vs = np.arange(v_min, v_max + grid_step / 2, grid_step)
    fixed = {
        i + 1: arr.seed_point[i]
        for i in range(arr.n)
        if (i + 1) not in axes
    }
    U = np.stack([np.ones_like(us), us, us * us], axis=1)
    V = np.stack([np.ones_like(vs), vs, vs * vs], axis=1)
    grids = []
    for prim in arr.primitives:
        C = _plane_coeff_matrix(prim.f, axes, fixed)
        grids.append((U @ C) @ V.T)
    inside = None
    for g in grids:
        inside = (g > 0) if inside is None else inside & (g > 0)

    def sx(u: float) -> float:
        return (u - u_min) / (u_max - u_min) * width

    def sy(v: float) -> float:
        return height - (v - v_min) / (v_max - v_min) * height

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]

    # shaded domain: merge horizontal runs of interior cells per row
    cell_rects = []
    for i in range(len(us) - 1):
        j = 0
        while j < len(vs) - 1:
            if inside[i, j] and inside[i + 1, j] and inside[i, j + 1] and inside[i + 1, j + 1]:
                j0 = j
                while (
                    j < len(vs) - 1
                    and inside[i, j] and inside[i + 1, j]
                    and inside[i, j + 1] and inside[i + 1, j + 1]
                ):
                    j += 1
                x = sx(us[i])
                y = sy(vs[j])
                w = sx(us[i + 1]) - x
                h = sy(vs[j0]) - y
                cell_rects.append(
                    f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
                    f'fill="#cfe8f3"/>'
                )
            else:
                j += 1
    parts.extend(cell_rects)

    # axis line for the second coordinate = 0 if visible
    if v_min < 0 < v_max:
        parts.append(
            f'<line x1="0" y1="{_fmt(sy(0.0))}" x2="{width}" y2="{_fmt(sy(0.0))}" '
            f'stroke="#999999" stroke-width="0.5"/>'
        )

    # zero curves
    for idx, g in enumerate(grids):
        color = PALETTE[idx % len(PALETTE)]
        pieces = []
        for (p1, p2) in _marching_squares(g, us, vs):
            pieces.append(
                f"M {_fmt(sx(p1[0]))} {_fmt(sy(p1[1]))} L {_fmt(sx(p2[0]))} {_fmt(sy(p2[1]))}"
            )
        if pieces:
            parts.append(
                f'<path d="{" ".join(pieces)}" stroke="{color}" stroke-width="1.5" fill="none"/>'
            )

    # t tick marks on the first plotted axis
    if arr.t_values and axes[0] == 1:
        for t in arr.t_values:
            x = sx(float(t))
            parts.append(
                f'<line x1="{_fmt(x)}" y1="{height - 12}" x2="{_fmt(x)}" y2="{height}" '
                f'stroke="black" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{_fmt(x + 2)}" y="{height - 2}" font-size="10">{t}</text>'
            )

    # ellipsoid pole markers
    for prim in arr.primitives:
        if "centers" not in prim.metadata:
            continue
        centers = prim.metadata["centers"]
        radii = prim.metadata["radii_sq"]
        root = sqrt_fraction(Fraction(radii[0]))
        if root is None or axes[0] != 1:
            continue
        cv = centers[axes[1] - 1] if len(centers) >= axes[1] else Fraction(0)
        for sgn in (1, -1):
            px = float(centers[0]) + sgn * float(root)
            parts.append(
                f'<circle cx="{_fmt(sx(px))}" cy="{_fmt(sy(float(cv)))}" r="3" '
                f'fill="black"/>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"

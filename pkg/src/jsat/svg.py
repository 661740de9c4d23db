"""Hand-emitted SVG reports (no plotting dependency).

All charts use a fixed 800x600 canvas with a documented margin box; every
plotted datum maps to exactly one element carrying a semantic class
(``node``, ``stripe``, ``run``, ``cell``), so structural tests can count
elements instead of comparing pixels.
"""

from __future__ import annotations

import io
import math
from typing import Sequence

from .model import JsatModel
from .nav import OccupancyGrid
from .sim import SimTrace
from .sweep import FrontierRow, SweepRow
from .topology import CentralityReport

WIDTH, HEIGHT = 800, 600
MARGIN = 60


class SvgCanvas:
    """Tiny element-by-element SVG writer."""

    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width = width
        self.height = height
        self._buf = io.StringIO()
        self._buf.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
        )

    def rect(self, x, y, w, h, fill="#888", cls="", extra=""):
        cls_attr = f' class="{cls}"' if cls else ""
        self._buf.write(
            f'<rect{cls_attr} x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}" {extra}/>\n'
        )

    def circle(self, cx, cy, r, fill="#36c", cls="", extra=""):
        cls_attr = f' class="{cls}"' if cls else ""
        self._buf.write(f'<circle{cls_attr} cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{fill}" {extra}/>\n')

    def line(self, x1, y1, x2, y2, stroke="#444", width=1.0, extra=""):
        self._buf.write(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:g}" {extra}/>\n'
        )

    def polyline(self, points: Sequence[tuple[float, float]], stroke="#c33", cls="", extra=""):
        cls_attr = f' class="{cls}"' if cls else ""
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self._buf.write(f'<polyline{cls_attr} points="{pts}" fill="none" stroke="{stroke}" {extra}/>\n')

    def text(self, x, y, content, size=12, anchor="start", fill="#222"):
        safe = content.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        self._buf.write(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" text-anchor="{anchor}" '
            f'fill="{fill}" font-family="sans-serif">{safe}</text>\n'
        )

    def render(self) -> str:
        return self._buf.getvalue() + "</svg>\n"


def concentric_svg(report: CentralityReport) -> str:
    """Concentric layout: higher combined centrality sits closer to the middle.

    The horizontal direction annotates dependence on upstream nodes (eig_in),
    the vertical direction influence on downstream ones (eig_out).
    """
    canvas = SvgCanvas()
    cx, cy = WIDTH / 2, HEIGHT / 2
    r_max = min(WIDTH, HEIGHT) / 2 - MARGIN
    ranked = sorted(report.nodes, key=lambda n: (-(n.eig_in + n.eig_out), n.node_id))
    rank = {n.node_id: i for i, n in enumerate(ranked)}
    n_total = len(ranked)
    for ring in (0.33, 0.66, 1.0):
        canvas.circle(cx, cy, r_max * ring, fill="none", extra='stroke="#ddd"')
    canvas.text(cx + r_max + 8, cy, "depends on others", size=11, anchor="start", fill="#777")
    canvas.text(cx, cy - r_max - 10, "relied on by others", size=11, anchor="middle", fill="#777")
    ordered = sorted(report.nodes, key=lambda n: n.node_id)
    for i, node in enumerate(ordered):
        angle = 2.0 * math.pi * i / max(1, n_total) - math.pi / 2
        radius = r_max * (rank[node.node_id] + 1) / (n_total + 1)
        x = cx + radius * math.cos(angle)
        y = cy + radius * math.sin(angle)
        fill = "#36c" if node.kind == "function" else "#393"
        canvas.circle(x, y, 6 if node.kind == "function" else 4.5, fill=fill, cls="node")
        canvas.text(x + 7, y + 4, node.node_id, size=10)
    return canvas.render()


def activity_svg(trace: SimTrace, model: JsatModel) -> str:
    """Stripe raster of function occurrences over time, one row per function."""
    canvas = SvgCanvas()
    functions = [f.id for f in model.functions]
    t_end = max(trace.final_time, 1e-9)
    row_h = (HEIGHT - 2 * MARGIN) / max(1, len(functions))
    span = WIDTH - 2 * MARGIN
    canvas.line(MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN)
    canvas.text(WIDTH / 2, HEIGHT - MARGIN + 30, "time (s)", anchor="middle", size=11, fill="#777")
    for i, fn in enumerate(functions):
        y = MARGIN + i * row_h
        canvas.text(MARGIN - 6, y + row_h * 0.7, fn, size=10, anchor="end")
        canvas.line(MARGIN, y + row_h, WIDTH - MARGIN, y + row_h, stroke="#eee")
    for event in trace.events:
        if event.kind != "function-exec" or event.function not in functions:
            continue
        i = functions.index(event.function)
        x = MARGIN + span * (event.time / t_end)
        canvas.rect(x, MARGIN + i * row_h + 2, 1.2, row_h - 4, fill="#236", cls="stripe")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        canvas.text(MARGIN + span * frac, HEIGHT - MARGIN + 14, f"{t_end * frac:.0f}", size=9, anchor="middle")
    return canvas.render()


def trajectory_svg(trace: SimTrace, true_map: OccupancyGrid,
                   start: tuple[float, float], goal: tuple[float, float]) -> str:
    """Map overlay: debris cells, the driven trajectory, start and goal marks."""
    canvas = SvgCanvas()
    extent_x = true_map.width * true_map.cell_size
    extent_y = true_map.height * true_map.cell_size
    scale = min((WIDTH - 2 * MARGIN) / extent_x, (HEIGHT - 2 * MARGIN) / extent_y)

    def to_px(x: float, y: float) -> tuple[float, float]:
        return (MARGIN + (x - true_map.origin[0]) * scale,
                HEIGHT - MARGIN - (y - true_map.origin[1]) * scale)

    cell_px = true_map.cell_size * scale
    for r in range(true_map.height):
        for c in range(true_map.width):
            if true_map.cells[r, c]:
                x, y = to_px(true_map.origin[0] + c * true_map.cell_size,
                             true_map.origin[1] + (r + 1) * true_map.cell_size)
                canvas.rect(x, y, cell_px, cell_px, fill="#c9b29b", cls="cell")
    points = [to_px(x, y) for _, x, y, _ in trace.trajectory]
    canvas.polyline(points, stroke="#c33", cls="traj", extra='stroke-width="1.5"')
    sx, sy = to_px(*start)
    gx, gy = to_px(*goal)
    canvas.circle(sx, sy, 5, fill="#36c", cls="mark")
    canvas.circle(gx, gy, 5, fill="#3a3", cls="mark")
    canvas.text(sx + 8, sy, "start", size=10)
    canvas.text(gx + 8, gy, "goal", size=10)
    return canvas.render()


def sweep_svg(rows: list[SweepRow], frontier_rows: list[FrontierRow]) -> str:
    """Exchanges versus look-ahead scatter with the minimum-safe frontier polyline."""
    canvas = SvgCanvas()
    lads = sorted({r.lad_m for r in rows})
    taus = sorted({r.currency_s for r in rows})
    max_ex = max((r.exchanges for r in rows), default=1) or 1
    span_x = WIDTH - 2 * MARGIN
    span_y = HEIGHT - 2 * MARGIN
    lad_lo, lad_hi = min(lads), max(lads)

    def to_px(lad: float, exchanges: float) -> tuple[float, float]:
        fx = 0.5 if lad_hi == lad_lo else (lad - lad_lo) / (lad_hi - lad_lo)
        return (MARGIN + span_x * fx, HEIGHT - MARGIN - span_y * exchanges / max_ex)

    canvas.line(MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN)
    canvas.line(MARGIN, MARGIN, MARGIN, HEIGHT - MARGIN)
    canvas.text(WIDTH / 2, HEIGHT - MARGIN + 30, "look-ahead distance (m)", anchor="middle", size=11, fill="#777")
    canvas.text(MARGIN - 40, MARGIN - 14, "exchanges", size=11, fill="#777")
    for lad in lads:
        x, _ = to_px(lad, 0)
        canvas.text(x, HEIGHT - MARGIN + 14, f"{lad:g}", size=9, anchor="middle")
    for r in rows:
        x, y = to_px(r.lad_m, r.exchanges)
        hue = 0 if len(taus) < 2 else int(240 * taus.index(r.currency_s) / (len(taus) - 1))
        fill = f"hsl({hue},70%,45%)"
        canvas.circle(x, y, 3.5 if r.unsafe_entries == 0 else 2.5, fill=fill, cls="run",
                      extra='' if r.unsafe_entries == 0 else 'opacity="0.45"')
    feasible = [(f.lad_m, f.min_exchanges) for f in frontier_rows if f.feasible]
    if feasible:
        canvas.polyline([to_px(lad, ex) for lad, ex in feasible], stroke="#222", cls="frontier",
                        extra='stroke-dasharray="6,4" stroke-width="1.5"')
    return canvas.render()

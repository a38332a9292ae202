"""Deterministic scanline rasterizer for scene graphs.

Pixels are float64 RGB in [0, 255] sampled at pixel centers (i + 0.5,
j + 0.5), no antialiasing. Text renders as a box with 60% coverage of the
text fill color; glyph shaping is out of scope since the metrics only need
approximate ink mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroArea
from .geometry import Affine, Polygon, flatten_subpath
from .svgdoc import SceneGraph, VisualElement

METRIC_MAX_SIDE = 800.0
TEXT_COVERAGE = 0.6
TEXT_CHAR_WIDTH = 0.6  # fraction of font size per character


@dataclass
class RasterBuffer:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) float64, 0..255
    alpha: np.ndarray = field(default=None, repr=False)  # (height, width) coverage

    @staticmethod
    def blank(width: int, height: int) -> "RasterBuffer":
        return RasterBuffer(
            width,
            height,
            np.full((height, width, 3), 255.0, dtype=np.float64),
            np.zeros((height, width), dtype=np.float64),
        )

    def copy(self) -> "RasterBuffer":
        return RasterBuffer(self.width, self.height, self.pixels.copy(), self.alpha.copy())

    def gray_ink(self) -> np.ndarray:
        """255 - mean(R,G,B): white counts as zero ink."""
        return 255.0 - self.pixels.mean(axis=2)


def metric_scale(scene: SceneGraph) -> float:
    longest = max(scene.canvas_width, scene.canvas_height)
    return 1.0 if longest <= METRIC_MAX_SIDE else METRIC_MAX_SIDE / longest


# --------------------------------------------------------------------------
# span generation (device coordinates)

Spans = list[tuple[float, float]]


def _merge_spans(spans: Spans) -> Spans:
    if not spans:
        return spans
    spans = sorted(spans)
    out = [spans[0]]
    for a, b in spans[1:]:
        if a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _subtract_spans(outer: Spans, inner: Spans) -> Spans:
    out: Spans = []
    for a, b in outer:
        pieces = [(a, b)]
        for ia, ib in inner:
            nxt: Spans = []
            for pa, pb in pieces:
                if ib <= pa or ia >= pb:
                    nxt.append((pa, pb))
                else:
                    if ia > pa:
                        nxt.append((pa, ia))
                    if ib < pb:
                        nxt.append((ib, pb))
            pieces = nxt
        out.extend(pieces)
    return out


def polygon_row_spans(
    polys: list[Polygon], rule: str, height: int
) -> list[Spans]:
    """Scanline fill spans per pixel row for a set of device-space polygons.

    rule: "nonzero", "evenodd", or "union" (each polygon filled nonzero
    independently, rows merged -- used for stroke quads where opposing
    windings must not cancel).
    """
    if rule == "union":
        rows: list[Spans] = [[] for _ in range(height)]
        for poly in polys:
            for j, spans in enumerate(polygon_row_spans([poly], "nonzero", height)):
                if spans:
                    rows[j] = _merge_spans(rows[j] + spans)
        return rows

    edges = []  # (ymin, ymax, x_at_ymin, slope, direction)
    ymin_all, ymax_all = math.inf, -math.inf
    for poly in polys:
        pts = poly.vertices
        n = len(pts)
        if n < 3:
            continue
        for i in range(n):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % n]
            if y0 == y1:
                continue
            direction = 1 if y1 > y0 else -1
            if y0 > y1:
                x0, y0, x1, y1 = x1, y1, x0, y0
            edges.append((y0, y1, x0, (x1 - x0) / (y1 - y0), direction))
            ymin_all = min(ymin_all, y0)
            ymax_all = max(ymax_all, y1)
    rows: list[Spans] = [[] for _ in range(height)]
    if not edges:
        return rows
    j0 = max(0, int(math.floor(ymin_all - 0.5)))
    j1 = min(height - 1, int(math.ceil(ymax_all)))
    for j in range(j0, j1 + 1):
        y = j + 0.5
        crossings = []
        for ey0, ey1, ex0, slope, direction in edges:
            if ey0 <= y < ey1:
                crossings.append((ex0 + (y - ey0) * slope, direction))
        if not crossings:
            continue
        crossings.sort()
        spans: Spans = []
        if rule == "evenodd":
            for k in range(0, len(crossings) - 1, 2):
                spans.append((crossings[k][0], crossings[k + 1][0]))
        else:
            winding = 0
            start = 0.0
            for x, direction in crossings:
                prev = winding
                winding += direction
                if prev == 0 and winding != 0:
                    start = x
                elif prev != 0 and winding == 0:
                    spans.append((start, x))
        rows[j] = _merge_spans([s for s in spans if s[1] > s[0]])
    return rows


def ellipse_row_spans(
    center: tuple[float, float], mat: tuple[float, float, float, float], height: int
) -> list[Spans]:
    """Row spans of the affine image of the unit disk: p = center + M u, |u|<=1."""
    a, b, c, d = mat  # M = [[a, c], [b, d]]
    det = a * d - b * c
    rows: list[Spans] = [[] for _ in range(height)]
    if abs(det) < 1e-12:
        return rows
    ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det  # M^-1
    k11 = ia * ia + ic * ic
    k12 = ia * ib + ic * id_
    k22 = ib * ib + id_ * id_
    cy_extent = math.sqrt(b * b + d * d)
    j0 = max(0, int(math.floor(center[1] - cy_extent - 0.5)))
    j1 = min(height - 1, int(math.ceil(center[1] + cy_extent)))
    for j in range(j0, j1 + 1):
        dy = (j + 0.5) - center[1]
        # k11 dx^2 + 2 k12 dx dy + k22 dy^2 = 1
        qa, qb, qc = k11, 2 * k12 * dy, k22 * dy * dy - 1.0
        disc = qb * qb - 4 * qa * qc
        if disc <= 0:
            continue
        r = math.sqrt(disc)
        x0 = center[0] + (-qb - r) / (2 * qa)
        x1 = center[0] + (-qb + r) / (2 * qa)
        if x1 < x0:
            x0, x1 = x1, x0
        rows[j] = [(x0, x1)]
    return rows


def _stroke_quads(points: list[tuple[float, float]], width: float, closed: bool) -> list[Polygon]:
    quads = []
    hw = width / 2.0
    n = len(points)
    limit = n if closed else n - 1
    for i in range(limit):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        dx, dy = x1 - x0, y1 - y0
        norm = math.hypot(dx, dy)
        if norm < 1e-12:
            continue
        ox, oy = -dy / norm * hw, dx / norm * hw
        quads.append(Polygon([
            (x0 + ox, y0 + oy), (x1 + ox, y1 + oy),
            (x1 - ox, y1 - oy), (x0 - ox, y0 - oy),
        ]))
    return quads


def _element_device_polys(el: VisualElement, device: Affine, samples: int = 8) -> list[Polygon]:
    g = el.geometry
    if el.kind == "rect":
        corners = [
            (g["x"], g["y"]),
            (g["x"] + g["width"], g["y"]),
            (g["x"] + g["width"], g["y"] + g["height"]),
            (g["x"], g["y"] + g["height"]),
        ]
        return [Polygon([device.apply(*p) for p in corners])]
    if el.kind == "path":
        polys = []
        for sp in g["subpaths"]:
            try:
                polys.append(flatten_subpath(sp, device, samples))
            except Exception:
                continue
        return polys
    if el.kind == "text":
        return [Polygon([device.apply(*p) for p in text_box_corners(el)])]
    if el.kind == "line":
        return []
    raise ValueError(el.kind)


def text_box_corners(el: VisualElement) -> list[tuple[float, float]]:
    """Estimated text extents in user units: baseline-anchored box."""
    g = el.geometry
    n = max(len(el.text_content or ""), 1)
    w = TEXT_CHAR_WIDTH * el.font_size * n
    x = g["x"]
    if el.text_anchor == "middle":
        x -= w / 2.0
    elif el.text_anchor == "end":
        x -= w
    y0, y1 = g["y"] - el.font_size, g["y"]
    return [(x, y0), (x + w, y0), (x + w, y1), (x, y1)]


def _paint_ops(el: VisualElement, device: Affine, height: int):
    """Yield (row_spans, rgb, alpha) paint operations for one element."""
    g = el.geometry
    dev_sw = el.stroke_width * device.scale_factor()

    if el.kind in ("circle", "ellipse"):
        if el.kind == "circle":
            rx = ry = g["r"]
        else:
            rx, ry = g["rx"], g["ry"]
        center = device.apply(g["cx"], g["cy"])
        lin = (device.a, device.b, device.c, device.d)

        def scaled(fx: float, fy: float):
            return (lin[0] * fx, lin[1] * fx, lin[2] * fy, lin[3] * fy)

        if el.fill is not None and el.fill[3] > 0:
            spans = ellipse_row_spans(center, scaled(rx, ry), height)
            yield spans, el.fill[:3], el.fill[3] * el.opacity
        if el.stroke is not None and el.stroke[3] > 0 and el.stroke_width > 0:
            user_sw = el.stroke_width
            outer = ellipse_row_spans(center, scaled(rx + user_sw / 2, ry + user_sw / 2), height)
            inner = ellipse_row_spans(center, scaled(max(rx - user_sw / 2, 0), max(ry - user_sw / 2, 0)), height)
            rows = [_subtract_spans(o, i) for o, i in zip(outer, inner)]
            yield rows, el.stroke[:3], el.stroke[3] * el.opacity
        return

    if el.kind == "line":
        if el.stroke is not None and el.stroke[3] > 0 and el.stroke_width > 0:
            p0 = device.apply(g["x1"], g["y1"])
            p1 = device.apply(g["x2"], g["y2"])
            quads = _stroke_quads([p0, p1], dev_sw, closed=False)
            yield polygon_row_spans(quads, "union", height), el.stroke[:3], el.stroke[3] * el.opacity
        return

    if el.kind == "text":
        polys = _element_device_polys(el, device)
        color = el.fill[:3] if el.fill else (0, 0, 0)
        alpha = (el.fill[3] if el.fill else 1.0) * el.opacity * TEXT_COVERAGE
        yield polygon_row_spans(polys, "nonzero", height), color, alpha
        return

    polys = _element_device_polys(el, device)
    if not polys:
        return
    if el.fill is not None and el.fill[3] > 0:
        closed_polys = [p for p in polys if p.closed and len(p.vertices) >= 3]
        rule = el.fill_rule if el.kind == "path" else "nonzero"
        yield polygon_row_spans(closed_polys, rule, height), el.fill[:3], el.fill[3] * el.opacity
    if el.stroke is not None and el.stroke[3] > 0 and el.stroke_width > 0:
        quads = []
        for p in polys:
            quads.extend(_stroke_quads(p.vertices, dev_sw, p.closed))
        yield polygon_row_spans(quads, "union", height), el.stroke[:3], el.stroke[3] * el.opacity


def _paint_spans(buf: RasterBuffer, rows: list[Spans], rgb, alpha: float) -> None:
    if alpha <= 0:
        return
    color = np.asarray(rgb, dtype=np.float64)
    width = buf.width
    for j, spans in enumerate(rows):
        if not spans:
            continue
        spans = _merge_spans(spans) if len(spans) > 1 else spans
        for a, b in spans:
            i0 = max(0, int(math.ceil(a - 0.5)))
            i1 = min(width - 1, int(math.ceil(b - 0.5)) - 1)
            if i1 < i0:
                continue
            seg = buf.pixels[j, i0:i1 + 1]
            seg *= (1.0 - alpha)
            seg += alpha * color
            arow = buf.alpha[j, i0:i1 + 1]
            arow += (1.0 - arow) * alpha


def paint_elements(buf: RasterBuffer, elements: list[VisualElement], scale: float) -> None:
    device_base = Affine.scale(scale)
    for el in elements:
        device = device_base @ el.transform
        for rows, rgb, alpha in _paint_ops(el, device, buf.height):
            _paint_spans(buf, rows, rgb, alpha)


def rasterize(scene: SceneGraph, scale: float = 1.0) -> RasterBuffer:
    """Rasterize a scene over white at the given scale. Pure and deterministic."""
    if scale <= 0:
        raise ZeroArea("scale must be positive")
    width = int(round(scene.canvas_width * scale))
    height = int(round(scene.canvas_height * scale))
    if width < 1 or height < 1:
        raise ZeroArea(f"canvas scales to {width}x{height}")
    buf = RasterBuffer.blank(width, height)
    paint_elements(buf, scene.elements, scale)
    return buf


def rasterize_fragment(
    elements: list[VisualElement], width: int, height: int, scale: float = 1.0
) -> RasterBuffer:
    """Rasterize loose elements over white; the alpha plane tracks coverage so
    the result can be composited onto another buffer exactly."""
    buf = RasterBuffer.blank(max(width, 1), max(height, 1))
    paint_elements(buf, elements, scale)
    return buf


def composite_layer(base: RasterBuffer, layer: RasterBuffer) -> RasterBuffer:
    """Exact equivalent of painting the layer's elements onto base:
    out = layer_color + (1 - layer_alpha) * (base - white)."""
    out = base.copy()
    out.pixels = layer.pixels + (1.0 - layer.alpha)[..., None] * (base.pixels - 255.0)
    out.alpha = layer.alpha + (1.0 - layer.alpha) * base.alpha
    return out

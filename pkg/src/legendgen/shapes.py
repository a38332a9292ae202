"""Element-level geometry: polygon views, path flattening, bounding boxes."""

from __future__ import annotations

import math

from .errors import DegeneratePath, EmptySelection
from .geometry import Affine, Polygon, bbox_union, flatten_subpath
from .raster import text_box_corners
from .svgdoc import VisualElement

ELLIPSE_SAMPLES = 32


def element_polygons(
    el: VisualElement,
    samples_per_curve: int = 8,
    transform: Affine | None = None,
) -> list[Polygon]:
    """Polygon view of an element's drawn geometry, transform applied.

    Pass ``transform=Affine.identity()`` for the untransformed local shape.
    """
    t = el.transform if transform is None else transform
    g = el.geometry
    if el.kind == "rect":
        corners = [
            (g["x"], g["y"]),
            (g["x"] + g["width"], g["y"]),
            (g["x"] + g["width"], g["y"] + g["height"]),
            (g["x"], g["y"] + g["height"]),
        ]
        return [Polygon([t.apply(*p) for p in corners])]
    if el.kind in ("circle", "ellipse"):
        rx = ry = g.get("r", 0.0)
        if el.kind == "ellipse":
            rx, ry = g["rx"], g["ry"]
        pts = []
        for k in range(ELLIPSE_SAMPLES):
            a = 2 * math.pi * k / ELLIPSE_SAMPLES
            pts.append(t.apply(g["cx"] + rx * math.cos(a), g["cy"] + ry * math.sin(a)))
        return [Polygon(pts)]
    if el.kind == "line":
        return [Polygon([t.apply(g["x1"], g["y1"]), t.apply(g["x2"], g["y2"])], closed=False)]
    if el.kind == "text":
        return [Polygon([t.apply(*p) for p in text_box_corners(el)])]
    if el.kind == "path":
        polys = []
        for sp in g["subpaths"]:
            try:
                polys.append(flatten_subpath(sp, t, samples_per_curve))
            except DegeneratePath:
                continue
        return polys
    raise ValueError(f"unknown kind {el.kind!r}")


def flatten_path(el: VisualElement, samples_per_curve: int = 8) -> Polygon:
    """Flatten a path element to its dominant polygon (largest area subpath)."""
    if el.kind != "path":
        raise ValueError("flatten_path expects a path element")
    polys = element_polygons(el, samples_per_curve)
    closed = [p for p in polys if p.closed]
    candidates = closed or polys
    if not candidates:
        raise DegeneratePath(f"path {el.id} has no usable subpath")
    return max(candidates, key=lambda p: p.area())


def _ellipse_bbox(el: VisualElement) -> tuple[float, float, float, float]:
    g = el.geometry
    rx = ry = g.get("r", 0.0)
    if el.kind == "ellipse":
        rx, ry = g["rx"], g["ry"]
    t = el.transform
    cx, cy = t.apply(g["cx"], g["cy"])
    ex = math.hypot(t.a * rx, t.c * ry)
    ey = math.hypot(t.b * rx, t.d * ry)
    return (cx - ex, cy - ey, cx + ex, cy + ey)


def element_bbox(el: VisualElement, samples_per_curve: int = 8) -> tuple[float, float, float, float]:
    if el.kind in ("circle", "ellipse"):
        box = _ellipse_bbox(el)
    else:
        polys = element_polygons(el, samples_per_curve)
        boxes = [p.bbox() for p in polys if p.vertices]
        if not boxes:
            raise EmptySelection(f"element {el.id} has no geometry")
        box = bbox_union(boxes)
    if el.stroke is not None and el.stroke_width > 0:
        pad = el.stroke_width * el.transform.scale_factor() / 2.0
        box = (box[0] - pad, box[1] - pad, box[2] + pad, box[3] + pad)
    return box


def bounding_box(elements: list[VisualElement]) -> tuple[float, float, float, float]:
    """Tight axis-aligned box of the transformed geometry of all elements."""
    if not elements:
        raise EmptySelection("bounding_box of empty element list")
    return bbox_union([element_bbox(el) for el in elements])

"""Iconic symbol extraction: group scene elements that share a shape pattern.

Three stages run in order, each consuming only elements unclaimed by earlier
ones: exact geometry matching, transformed matching via centroid-vertices
descriptors, and fuzzy DBSCAN clustering over (area, aspect ratio).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cluster import dbscan, fuzzy_min_points, minmax_normalize
from .errors import DegeneratePath, NoSymbolsFound
from .geometry import Polygon
from .shapes import element_bbox, element_polygons, flatten_path
from .svgdoc import SceneGraph, VisualElement

MIN_GROUP_SIZE = 3
DESCRIPTOR_TOL = 1e-3
HAIRLINE_SPAN = 0.95
BACKGROUND_COVER = 0.90


@dataclass(frozen=True)
class ShapeDescriptor:
    distances: tuple[float, ...]
    vertex_count: int


@dataclass
class ShapeChannel:
    scale_factor: float = 1.0
    rotation: float = 0.0  # degrees


@dataclass
class IconicSymbol:
    symbol_id: str
    member_ids: list[str]
    representative_id: str
    match_stage: str  # exact | transformed | fuzzy
    shape_channels: dict[str, ShapeChannel] = field(default_factory=dict)
    kind: str = ""

    def __post_init__(self) -> None:
        assert self.member_ids, "symbol needs members"
        assert self.representative_id in self.member_ids


@dataclass
class FuzzyClusterParams:
    epsilon: float = 0.07

    def min_points(self, n: int) -> int:
        return fuzzy_min_points(n)


# --------------------------------------------------------------------------
# descriptors


def centroid_vertices_descriptor(poly: Polygon) -> ShapeDescriptor:
    """Normalized centroid-to-vertex distance sequence; rotation/scale invariant."""
    if not poly.closed or len(poly.vertices) < 3:
        raise DegeneratePath("descriptor needs a closed polygon with >= 3 vertices")
    cx, cy = poly.centroid()
    dists = [math.hypot(x - cx, y - cy) for x, y in poly.vertices]
    peak = max(dists)
    if peak < 1e-12:
        raise DegeneratePath("polygon collapses to its centroid")
    return ShapeDescriptor(tuple(d / peak for d in dists), len(dists))


def _cyclic_offset(a: tuple[float, ...], b: tuple[float, ...], tol: float) -> tuple[int, int] | None:
    """Offset k and direction d with a[i] ~ b[(d*i + k) % n] for all i."""
    n = len(a)
    for direction in (1, -1):
        for k in range(n):
            ok = True
            for i in range(n):
                if abs(a[i] - b[(direction * i + k) % n]) > tol:
                    ok = False
                    break
            if ok:
                return k, direction
    return None


def descriptor_match(a: ShapeDescriptor, b: ShapeDescriptor, tol: float = DESCRIPTOR_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a.vertex_count != b.vertex_count:
        return False
    return _cyclic_offset(a.distances, b.distances, tol) is not None


# --------------------------------------------------------------------------
# exact matching


def _canonical_geometry(el: VisualElement) -> tuple:
    g = el.geometry
    r9 = lambda v: round(v, 9)
    if el.kind == "rect":
        return ("rect", r9(g["width"]), r9(g["height"]))
    if el.kind == "circle":
        return ("circle", r9(g["r"]))
    if el.kind == "ellipse":
        return ("ellipse", r9(g["rx"]), r9(g["ry"]))
    if el.kind == "line":
        return ("line",)  # every segment is congruent up to rotation+scale
    if el.kind == "path":
        # translation-normalized segment list: same contour anywhere matches
        sig: list = ["path"]
        for sp in g["subpaths"]:
            x0, y0 = sp.start_point()
            sig.append("|")
            sig.append(sp.closed)
            for seg in sp.segments:
                sig.append(seg[0])
                coords = seg[1:] if seg[0] != "A" else seg[1:8] + seg[8:]
                if seg[0] == "A":
                    _, sx, sy, cx, cy, rx, ry, phi, t0, dt, ex, ey = seg
                    sig.extend((r9(sx - x0), r9(sy - y0), r9(cx - x0), r9(cy - y0),
                                r9(rx), r9(ry), r9(phi), r9(t0), r9(dt),
                                r9(ex - x0), r9(ey - y0)))
                else:
                    it = iter(coords)
                    for x, y in zip(it, it):
                        sig.extend((r9(x - x0), r9(y - y0)))
        return tuple(sig)
    raise ValueError(el.kind)


def _transform_channel(el: VisualElement, rep: VisualElement) -> ShapeChannel:
    dec = el.transform.decompose_similarity()
    ref = rep.transform.decompose_similarity()
    if dec is None or ref is None:
        return ShapeChannel()
    return ShapeChannel(
        scale_factor=dec[0] / ref[0],
        rotation=(dec[1] - ref[1]) % 360.0,
    )


def _line_channel(el: VisualElement, rep: VisualElement) -> ShapeChannel:
    def vec(e: VisualElement) -> tuple[float, float]:
        g = e.geometry
        p0 = e.transform.apply(g["x1"], g["y1"])
        p1 = e.transform.apply(g["x2"], g["y2"])
        return (p1[0] - p0[0], p1[1] - p0[1])

    (dx, dy), (rx, ry) = vec(el), vec(rep)
    ln, lr = math.hypot(dx, dy), math.hypot(rx, ry)
    if lr < 1e-12:
        return ShapeChannel()
    return ShapeChannel(
        scale_factor=ln / lr,
        rotation=(math.degrees(math.atan2(dy, dx) - math.atan2(ry, rx))) % 360.0,
    )


def _make_symbol(
    sid: str, members: list[VisualElement], stage: str,
    channel_fn=None,
    representative: VisualElement | None = None,
) -> IconicSymbol:
    rep = representative or members[0]
    channels = {}
    for m in members:
        channels[m.id] = channel_fn(m, rep) if channel_fn else ShapeChannel()
    return IconicSymbol(
        symbol_id=sid,
        member_ids=[m.id for m in members],
        representative_id=rep.id,
        match_stage=stage,
        shape_channels=channels,
        kind=rep.kind,
    )


def _size_family_channel(kind: str):
    """Channel for same-kind marks whose geometry varies along one size axis."""

    def fn(el: VisualElement, rep: VisualElement) -> ShapeChannel:
        g, rg = el.geometry, rep.geometry
        if kind == "rect":
            if abs(g["width"] - rg["width"]) > abs(g["height"] - rg["height"]):
                ratio = g["width"] / rg["width"]
            else:
                ratio = g["height"] / rg["height"] if rg["height"] else 1.0
        elif kind == "circle":
            ratio = g["r"] / rg["r"]
        else:
            ratio = g["rx"] / rg["rx"]
        base = _transform_channel(el, rep)
        return ShapeChannel(scale_factor=ratio * base.scale_factor, rotation=base.rotation)

    return fn


def exact_match_groups(elements: list[VisualElement]) -> list[IconicSymbol]:
    """Group elements whose untransformed geometry is identical within 1e-9.

    Rects / circles / ellipses that fail to form exact groups but vary along a
    single size dimension (bar widths, bubble radii) collapse into one symbol
    with the size captured as a scale channel.
    """
    order = {el.id: i for i, el in enumerate(elements)}
    groups: dict[tuple, list[VisualElement]] = {}
    for el in elements:
        if el.kind == "text":
            continue
        groups.setdefault(_canonical_geometry(el), []).append(el)

    symbols: list[IconicSymbol] = []
    leftovers: dict[str, list[VisualElement]] = {}
    counter = 0
    for key in groups:
        members = groups[key]
        kind = members[0].kind
        if len(members) >= MIN_GROUP_SIZE:
            channel_fn = _line_channel if kind == "line" else _transform_channel
            symbols.append(_make_symbol(f"exact{counter}", members, "exact", channel_fn))
            counter += 1
        else:
            leftovers.setdefault(kind, []).extend(members)

    for kind, members in leftovers.items():
        if kind not in ("rect", "circle", "ellipse") or len(members) < MIN_GROUP_SIZE:
            continue
        if kind == "rect":
            widths = {round(m.geometry["width"], 9) for m in members}
            heights = {round(m.geometry["height"], 9) for m in members}
            if len(widths) > 1 and len(heights) > 1:
                continue  # both dimensions vary: not a one-parameter family
        members = sorted(members, key=lambda m: order[m.id])
        symbols.append(_make_symbol(
            f"exact{counter}", members, "exact", _size_family_channel(kind)))
        counter += 1
    # keep discovery order stable: sort by first member's document position
    symbols.sort(key=lambda s: order[s.member_ids[0]])
    return symbols


# --------------------------------------------------------------------------
# transformed matching


def _path_polygon(el: VisualElement) -> Polygon | None:
    try:
        poly = flatten_path(el)
    except DegeneratePath:
        return None
    if not poly.closed or len(poly.vertices) < 3:
        return None
    return poly


def _recover_rotation(rep_poly: Polygon, poly: Polygon, offset: int, direction: int) -> float:
    """Mean angle between matched centroid->vertex rays, in degrees."""
    rc = rep_poly.centroid()
    pc = poly.centroid()
    n = len(rep_poly.vertices)
    sx = sy = 0.0
    for i in range(n):
        rx, ry = rep_poly.vertices[i]
        px, py = poly.vertices[(direction * i + offset) % n]
        a = math.atan2(py - pc[1], px - pc[0]) - math.atan2(ry - rc[1], rx - rc[0])
        sx += math.cos(a)
        sy += math.sin(a)
    return math.degrees(math.atan2(sy, sx)) % 360.0


def transformed_match_groups(paths: list[VisualElement]) -> list[IconicSymbol]:
    """Group path elements by shape descriptor; recover per-member rotation and
    scale relative to the group representative."""
    infos = []
    for el in paths:
        poly = _path_polygon(el)
        if poly is None:
            continue
        cx, cy = poly.centroid()
        peak = max(math.hypot(x - cx, y - cy) for x, y in poly.vertices)
        infos.append((el, poly, centroid_vertices_descriptor(poly), peak))

    used: set[str] = set()
    symbols = []
    counter = 0
    for i, (el, poly, desc, peak) in enumerate(infos):
        if el.id in used:
            continue
        members = [(el, poly, peak, 0, 1)]
        for el2, poly2, desc2, peak2 in infos[i + 1:]:
            if el2.id in used or desc2.vertex_count != desc.vertex_count:
                continue
            off = _cyclic_offset(desc.distances, desc2.distances, DESCRIPTOR_TOL)
            if off is not None:
                members.append((el2, poly2, peak2, off[0], off[1]))
        if len(members) < MIN_GROUP_SIZE:
            continue
        for m in members:
            used.add(m[0].id)
        rep_el, rep_poly, rep_peak = members[0][0], members[0][1], members[0][2]
        channels = {}
        for m_el, m_poly, m_peak, off, direction in members:
            channels[m_el.id] = ShapeChannel(
                scale_factor=m_peak / rep_peak,
                rotation=_recover_rotation(rep_poly, m_poly, off, direction),
            )
        symbols.append(IconicSymbol(
            symbol_id=f"transformed{counter}",
            member_ids=[m[0].id for m in members],
            representative_id=rep_el.id,
            match_stage="transformed",
            shape_channels=channels,
            kind="path",
        ))
        counter += 1
    return symbols


# --------------------------------------------------------------------------
# fuzzy clustering


def fuzzy_cluster(
    paths: list[VisualElement], params: FuzzyClusterParams | None = None
) -> list[IconicSymbol]:
    """DBSCAN over min-max normalized (area, aspect ratio); noise discarded.

    The representative is the median-area member so extraction stays
    deterministic.
    """
    params = params or FuzzyClusterParams()
    infos = []
    for el in paths:
        polys = element_polygons(el)
        if not polys:
            continue
        area = sum(p.area() for p in polys if len(p.vertices) >= 3)
        if area <= 0:
            continue
        x0, y0, x1, y1 = element_bbox(el)
        if y1 - y0 < 1e-12:
            continue
        infos.append((el, area, (x1 - x0) / (y1 - y0)))
    if not infos:
        return []
    feats = minmax_normalize(np.array([[a, r] for _, a, r in infos]))
    labels = dbscan(feats, params.epsilon, params.min_points(len(infos)))
    symbols = []
    for cluster_id in sorted(set(labels) - {-1}):
        members = [infos[i] for i in range(len(infos)) if labels[i] == cluster_id]
        by_area = sorted(members, key=lambda m: (m[1], m[0].id))
        rep_el, rep_area, _ = by_area[len(by_area) // 2]
        channels = {
            el.id: ShapeChannel(scale_factor=math.sqrt(area / rep_area))
            for el, area, _ in members
        }
        symbols.append(IconicSymbol(
            symbol_id=f"fuzzy{cluster_id}",
            member_ids=[m[0].id for m in members],
            representative_id=rep_el.id,
            match_stage="fuzzy",
            shape_channels=channels,
            kind="path",
        ))
    return symbols


# --------------------------------------------------------------------------
# pipeline


def _is_data_mark_candidate(el: VisualElement, scene: SceneGraph) -> bool:
    if el.kind == "text":
        return False
    if el.kind == "line":
        x0, y0, x1, y1 = element_bbox(el)
        if (x1 - x0) >= HAIRLINE_SPAN * scene.canvas_width:
            return False
        if (y1 - y0) >= HAIRLINE_SPAN * scene.canvas_height:
            return False
    if el.kind == "rect":
        x0, y0, x1, y1 = element_bbox(el)
        cover = (x1 - x0) * (y1 - y0) / (scene.canvas_width * scene.canvas_height)
        if cover >= BACKGROUND_COVER:
            return False
    return True


def extract_symbols(scene: SceneGraph) -> list[IconicSymbol]:
    """Run exact -> transformed -> fuzzy over the scene's data-mark candidates."""
    candidates = [el for el in scene.elements if _is_data_mark_candidate(el, scene)]
    claimed: set[str] = set()
    out: list[IconicSymbol] = []

    for sym in exact_match_groups(candidates):
        out.append(sym)
        claimed.update(sym.member_ids)

    paths = [el for el in candidates if el.kind == "path" and el.id not in claimed]
    for sym in transformed_match_groups(paths):
        out.append(sym)
        claimed.update(sym.member_ids)

    paths = [el for el in candidates if el.kind == "path" and el.id not in claimed]
    for sym in fuzzy_cluster(paths):
        out.append(sym)
        claimed.update(sym.member_ids)

    if not out:
        raise NoSymbolsFound("no groupable marks in scene")
    for i, sym in enumerate(out):
        sym.symbol_id = f"sym{i}"
    return out

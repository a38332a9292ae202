"""Legend quality metrics and the model input vector.

Conventions: pixel centers sit at (i + 0.5, j + 0.5); the geometric canvas
center is (width/2, height/2), so point-symmetric ink yields exactly I = 0.
Obstruction and ink balance run at the capped metric scale; S and the
preference features live in user units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import kendalltau

from .channels import ChannelGroup, EncodingChannel
from .design import CompositeDocument, LegendFragment, LegendSpec
from .errors import InvalidBoxes, NoInk, NonFiniteInput, RegionOutOfBounds
from .labcolor import relative_luminance
from .raster import RasterBuffer, metric_scale, paint_elements, rasterize
from .shapes import element_bbox
from .svgdoc import SceneGraph, VisualElement
from .symbols import IconicSymbol

FIELD_ORDER = ("O", "I", "R", "S", "C", "pref_h", "pref_v", "pref_c")

O_NORM = 127.5
S_CLAMP = 2.0
C_MAX = 3.0


@dataclass(frozen=True)
class MetricVector:
    obstruction: float          # O, pixel-value std (0..127.5 typical)
    ink_balance: float          # I, already normalized by half-diagonal
    readability: float          # R in [1, 21]
    size_increase: float        # S >= 0, area ratio
    correspondence: float       # C in [0, 3]
    pref_horizontal: float
    pref_vertical: float
    pref_center_distance: float

    def features(self) -> np.ndarray:
        """Normalized 8-vector in [0, 1], fixed order O,I,R,S,C,ph,pv,pc."""
        return np.array([
            self.obstruction / O_NORM,
            self.ink_balance,
            (self.readability - 1.0) / 20.0,
            min(self.size_increase, S_CLAMP) / S_CLAMP,
            self.correspondence / C_MAX,
            self.pref_horizontal,
            self.pref_vertical,
            self.pref_center_distance,
        ])

    def to_record(self) -> dict:
        vals = (self.obstruction, self.ink_balance, self.readability,
                self.size_increase, self.correspondence, self.pref_horizontal,
                self.pref_vertical, self.pref_center_distance)
        return dict(zip(FIELD_ORDER, vals))

    @staticmethod
    def from_record(rec: dict) -> "MetricVector":
        return MetricVector(*(float(rec[k]) for k in FIELD_ORDER))

    def all_finite(self) -> bool:
        return bool(np.isfinite(self.features()).all())


# --------------------------------------------------------------------------
# individual metrics


def _pixel_range(lo: float, hi: float, limit: int) -> tuple[int, int]:
    """Indices of pixel centers falling inside [lo, hi), clipped to buffer."""
    i0 = max(0, math.ceil(lo - 0.5))
    i1 = min(limit - 1, math.ceil(hi - 0.5) - 1)
    return i0, i1


def obstruction(raster: RasterBuffer, region: tuple[float, float, float, float]) -> float:
    """Std of mean-channel pixel values over the region of the chart raster."""
    x0, y0, x1, y1 = region
    eps = 1e-9
    if x0 < -eps or y0 < -eps or x1 > raster.width + eps or y1 > raster.height + eps:
        raise RegionOutOfBounds(f"region {region} exceeds {raster.width}x{raster.height}")
    i0, i1 = _pixel_range(x0, x1, raster.width)
    j0, j1 = _pixel_range(y0, y1, raster.height)
    if i1 < i0 or j1 < j0:
        raise RegionOutOfBounds("region selects no pixels")
    window = raster.pixels[j0:j1 + 1, i0:i1 + 1].mean(axis=2)
    return float(window.std())


def ink_balance(raster: RasterBuffer) -> float:
    """Distance in px between the grayscale ink centroid and the canvas center."""
    g = raster.gray_ink()
    total = g.sum()
    if total <= 0:
        raise NoInk("all-white raster has no ink centroid")
    xs = np.arange(raster.width) + 0.5
    ys = np.arange(raster.height) + 0.5
    x_c = (g.sum(axis=0) * xs).sum() / total
    y_c = (g.sum(axis=1) * ys).sum() / total
    return float(math.hypot(x_c - raster.width / 2.0, y_c - raster.height / 2.0))


def contrast_ratio(fg: tuple[int, int, int], bg: tuple[int, int, int]) -> float:
    """WCAG 2.0 contrast ratio, in [1, 21]."""
    la = relative_luminance(fg)
    lb = relative_luminance(bg)
    lmax, lmin = max(la, lb), min(la, lb)
    return (lmax + 0.05) / (lmin + 0.05)


def size_increase(
    vis_bbox: tuple[float, float, float, float],
    combined_bbox: tuple[float, float, float, float],
) -> float:
    vw, vh = vis_bbox[2] - vis_bbox[0], vis_bbox[3] - vis_bbox[1]
    cw, ch = combined_bbox[2] - combined_bbox[0], combined_bbox[3] - combined_bbox[1]
    if vw <= 0 or vh <= 0 or cw <= 0 or ch <= 0:
        raise InvalidBoxes("boxes must have positive area")
    eps = 1e-6
    if (combined_bbox[0] > vis_bbox[0] + eps or combined_bbox[1] > vis_bbox[1] + eps
            or combined_bbox[2] < vis_bbox[2] - eps or combined_bbox[3] < vis_bbox[3] - eps):
        raise InvalidBoxes("combined box must contain the chart box")
    return (cw * ch - vw * vh) / (vw * vh)


# --------------------------------------------------------------------------
# correspondence


def _element_color(el: VisualElement) -> tuple[int, int, int] | None:
    paint = el.fill if el.fill is not None else el.stroke
    return None if paint is None else (paint[0], paint[1], paint[2])


def _color_component(ch: EncodingChannel, scene: SceneGraph) -> float:
    if ch.kind != "color":
        return 1.0
    member_colors = set()
    for mid in ch.element_map:
        el = scene.element_by_id(mid)
        if el is not None:
            c = _element_color(el)
            if c is not None:
                member_colors.add(c)
    if not ch.ordered_values:
        return 0.0
    hits = sum(1 for c in ch.ordered_values if tuple(c) in member_colors)
    return hits / len(ch.ordered_values)


def _shape_component(symbol_type: str) -> float:
    if symbol_type == "semantic":
        return 1.0
    if symbol_type in ("non_semantic", "data_encoded"):
        return 0.5
    return 0.0


def _tau_to_unit(tau: float) -> float:
    return (tau + 1.0) / 2.0


def order_component(ch: EncodingChannel, scene: SceneGraph) -> float:
    """Kendall agreement between legend order and dominant spatial order."""
    pairs = []
    for mid, value in ch.element_map.items():
        el = scene.element_by_id(mid)
        if el is None:
            continue
        box = element_bbox(el)
        pairs.append((value, (box[0] + box[2]) / 2, (box[1] + box[3]) / 2))
    if ch.is_continuous():
        samples = pairs
    else:
        by_value: dict[float, list] = {}
        for v, x, y in pairs:
            by_value.setdefault(v, []).append((x, y))
        samples = [
            (v, float(np.mean([p[0] for p in pts])), float(np.mean([p[1] for p in pts])))
            for v, pts in sorted(by_value.items())
        ]
    if len(samples) < 2:
        return 1.0
    values = [s[0] for s in samples]
    tau_x = kendalltau(values, [s[1] for s in samples]).statistic
    tau_y = kendalltau(values, [s[2] for s in samples]).statistic
    tau_x = 0.0 if tau_x is None or math.isnan(tau_x) else tau_x
    tau_y = 0.0 if tau_y is None or math.isnan(tau_y) else tau_y
    best = tau_x if abs(tau_x) >= abs(tau_y) else tau_y
    return _tau_to_unit(best)


def correspondence(
    spec: LegendSpec,
    groups: list[ChannelGroup],
    symbols: list[IconicSymbol],
    scene: SceneGraph,
) -> float:
    """C = C_color + C_shape + C_order, each component averaged over groups."""
    by_id = {g.group_id: g for g in groups}
    colors, shapes, orders = [], [], []
    for gid in spec.channel_group_ids:
        ch = by_id[gid].primary()
        colors.append(_color_component(ch, scene))
        shapes.append(_shape_component(spec.symbol_type))
        orders.append(order_component(ch, scene))
    if not colors:
        return 0.0
    return float(np.mean(colors) + np.mean(shapes) + np.mean(orders))


# --------------------------------------------------------------------------
# assembly


def _clamp01(v: float) -> float:
    return min(max(v, 0.0), 1.0)


def _pref_fields(doc: CompositeDocument) -> tuple[float, float, float]:
    scene = doc.scene
    ax, ay = doc.spec.anchor
    lx0, ly0, lx1, ly1 = doc.legend_bbox()
    cx, cy = (lx0 + lx1) / 2, (ly0 + ly1) / 2
    half_diag = math.hypot(scene.canvas_width, scene.canvas_height) / 2.0
    dist = math.hypot(cx - scene.canvas_width / 2, cy - scene.canvas_height / 2)
    return (
        _clamp01(ax / scene.canvas_width),
        _clamp01(ay / scene.canvas_height),
        _clamp01(dist / half_diag),
    )


def _readability(
    doc: CompositeDocument,
    backdrop_fn,
) -> float:
    items = doc.fragment.text_items
    if not items:
        return 21.0
    ax, ay = doc.spec.anchor
    worst = 21.0
    for item in items:
        if item.backdrop is not None:
            bg = item.backdrop
        else:
            box = (item.box[0] + ax, item.box[1] + ay, item.box[2] + ax, item.box[3] + ay)
            bg = backdrop_fn(box)
        worst = min(worst, contrast_ratio(item.color, bg))
    return worst


def _region_mean_color_direct(raster: RasterBuffer, box, scale: float):
    i0, i1 = _pixel_range(box[0] * scale, box[2] * scale, raster.width)
    j0, j1 = _pixel_range(box[1] * scale, box[3] * scale, raster.height)
    if i1 < i0 or j1 < j0:
        return (255, 255, 255)
    window = raster.pixels[j0:j1 + 1, i0:i1 + 1]
    mean = window.reshape(-1, 3).mean(axis=0)
    return tuple(float(v) for v in mean)


def metric_vector(doc: CompositeDocument, cache: "ChartContext | None" = None) -> MetricVector:
    """Assemble the eight-field quality vector for one candidate document.

    With a ChartContext the cached fast path runs; otherwise everything is
    computed directly from fresh rasterizations.
    """
    if cache is not None:
        return cache.evaluate(doc)

    scene = doc.scene
    scale = metric_scale(scene)
    base = rasterize(scene, scale)

    lb = doc.legend_bbox()
    region = (lb[0] * scale, lb[1] * scale, lb[2] * scale, lb[3] * scale)
    clipped = (
        max(region[0], 0.0), max(region[1], 0.0),
        min(region[2], base.width), min(region[3], base.height),
    )
    if clipped[2] - clipped[0] >= 1.0 and clipped[3] - clipped[1] >= 1.0:
        o_val = obstruction(base, clipped)
    else:
        o_val = 0.0

    composite = base.copy()
    frag_elements = []
    from .geometry import Affine

    shift = Affine.translate(*doc.spec.anchor)
    for el in doc.fragment.elements:
        moved = el.copy()
        moved.transform = shift @ el.transform
        frag_elements.append(moved)
    paint_elements(composite, frag_elements, scale)
    half_diag = math.hypot(composite.width, composite.height) / 2.0
    i_val = ink_balance(composite) / half_diag

    r_val = _readability(doc, lambda box: _region_mean_color_direct(base, box, scale))
    s_val = size_increase(doc.vis_bbox, doc.combined_bbox)
    c_val = correspondence(doc.spec, doc.groups, doc.symbols, scene)
    ph, pv, pc = _pref_fields(doc)

    mv = MetricVector(o_val, i_val, r_val, s_val, c_val, ph, pv, pc)
    if not mv.all_finite():
        raise NonFiniteInput("metric vector has non-finite fields")
    return mv


# --------------------------------------------------------------------------
# cached evaluation


def _integral(plane: np.ndarray) -> np.ndarray:
    out = np.zeros((plane.shape[0] + 1, plane.shape[1] + 1), dtype=np.float64)
    np.cumsum(np.cumsum(plane, axis=0), axis=1, out=out[1:, 1:])
    return out


class ChartContext:
    """Per-chart precomputation: base raster, integral images, legend caches.

    Shared read-only across candidate evaluations; the legend layer cache is
    keyed by the discrete part of the spec, so a GA run re-renders each
    distinct combination once.
    """

    def __init__(
        self,
        scene: SceneGraph,
        symbols: list[IconicSymbol],
        groups: list[ChannelGroup],
        render_fn,
    ):
        self.scene = scene
        self.symbols = symbols
        self.groups = groups
        self._render_fn = render_fn
        self.scale = metric_scale(scene)
        self.base = rasterize(scene, self.scale)
        mean = self.base.pixels.mean(axis=2)
        self._ii_mean = _integral(mean)
        self._ii_mean2 = _integral(mean * mean)
        self._ii_r = _integral(self.base.pixels[:, :, 0])
        self._ii_g = _integral(self.base.pixels[:, :, 1])
        self._ii_b = _integral(self.base.pixels[:, :, 2])
        gray = 255.0 - mean
        xs = np.arange(self.base.width) + 0.5
        ys = np.arange(self.base.height) + 0.5
        self._base_gray = gray
        self._base_m0 = float(gray.sum())
        self._base_mx = float((gray.sum(axis=0) * xs).sum())
        self._base_my = float((gray.sum(axis=1) * ys).sum())
        from .shapes import bounding_box

        self.vis_bbox = bounding_box(scene.elements)
        self._layer_cache: dict[tuple, dict] = {}
        self._order_cache: dict[str, float] = {}
        self._color_cache: dict[str, float] = {}

    # -- pieces ------------------------------------------------------------

    def _win(self, ii: np.ndarray, j0: int, j1: int, i0: int, i1: int) -> float:
        return float(ii[j1 + 1, i1 + 1] - ii[j0, i1 + 1] - ii[j1 + 1, i0] + ii[j0, i0])

    def _obstruction(self, region) -> float:
        x0, y0, x1, y1 = region
        x0, y0 = max(x0, 0.0), max(y0, 0.0)
        x1, y1 = min(x1, float(self.base.width)), min(y1, float(self.base.height))
        if x1 - x0 < 1.0 or y1 - y0 < 1.0:
            return 0.0
        i0, i1 = _pixel_range(x0, x1, self.base.width)
        j0, j1 = _pixel_range(y0, y1, self.base.height)
        if i1 < i0 or j1 < j0:
            return 0.0
        n = (i1 - i0 + 1) * (j1 - j0 + 1)
        s1 = self._win(self._ii_mean, j0, j1, i0, i1)
        s2 = self._win(self._ii_mean2, j0, j1, i0, i1)
        var = max(s2 / n - (s1 / n) ** 2, 0.0)
        if var < 1e-4:  # integral-image cancellation noise on uniform regions
            return 0.0
        return math.sqrt(var)

    def _mean_color(self, box) -> tuple[float, float, float]:
        s = self.scale
        i0, i1 = _pixel_range(box[0] * s, box[2] * s, self.base.width)
        j0, j1 = _pixel_range(box[1] * s, box[3] * s, self.base.height)
        if i1 < i0 or j1 < j0:
            return (255.0, 255.0, 255.0)
        n = (i1 - i0 + 1) * (j1 - j0 + 1)
        return (
            self._win(self._ii_r, j0, j1, i0, i1) / n,
            self._win(self._ii_g, j0, j1, i0, i1) / n,
            self._win(self._ii_b, j0, j1, i0, i1) / n,
        )

    def layer_for(self, spec: LegendSpec) -> dict:
        key = (
            spec.symbol_type, spec.symbol_layout, spec.text_layout,
            spec.multi_layout, spec.direction, spec.swatch_size, spec.text_color,
            tuple(spec.channel_group_ids),
        )
        hit = self._layer_cache.get(key)
        if hit is not None:
            return hit
        fragment: LegendFragment = self._render_fn(spec)
        margin_user = 24.0
        m = math.ceil(margin_user * self.scale)
        w = math.ceil(fragment.width * self.scale) + 2 * m
        h = math.ceil(fragment.height * self.scale) + 2 * m
        from .geometry import Affine
        from .raster import RasterBuffer as _RB

        buf = _RB.blank(max(w, 1), max(h, 1))
        shift = Affine.translate(m / self.scale, m / self.scale)
        moved = []
        for el in fragment.elements:
            c = el.copy()
            c.transform = shift @ el.transform
            moved.append(c)
        paint_elements(buf, moved, self.scale)
        gray_layer = 255.0 - buf.pixels.mean(axis=2)
        one_minus_a = 1.0 - buf.alpha
        entry = {
            "fragment": fragment,
            "margin": m,
            "gray": gray_layer,
            "keep": one_minus_a,
        }
        self._layer_cache[key] = entry
        return entry

    def _ink_balance(self, spec: LegendSpec, entry: dict) -> float:
        sc = self.scale
        m = entry["margin"]
        gl = entry["gray"]
        keep = entry["keep"]
        H, W = gl.shape
        # integer device offset of the layer buffer origin
        ox = round(spec.anchor[0] * sc) - m
        oy = round(spec.anchor[1] * sc) - m
        bi0, bj0 = max(0, -ox), max(0, -oy)
        bi1 = min(W, self.base.width - ox)
        bj1 = min(H, self.base.height - oy)
        m0, mx, my = self._base_m0, self._base_mx, self._base_my
        if bi1 > bi0 and bj1 > bj0:
            sub_g = gl[bj0:bj1, bi0:bi1]
            sub_k = keep[bj0:bj1, bi0:bi1]
            base_win = self._base_gray[bj0 + oy:bj1 + oy, bi0 + ox:bi1 + ox]
            comp = sub_g + sub_k * base_win
            delta = comp - base_win
            xs = np.arange(bi0 + ox, bi1 + ox) + 0.5
            ys = np.arange(bj0 + oy, bj1 + oy) + 0.5
            m0 += float(delta.sum())
            mx += float((delta.sum(axis=0) * xs).sum())
            my += float((delta.sum(axis=1) * ys).sum())
        if m0 <= 0:
            raise NoInk("composited raster has no ink")
        half_diag = math.hypot(self.base.width, self.base.height) / 2.0
        dx = mx / m0 - self.base.width / 2.0
        dy = my / m0 - self.base.height / 2.0
        return math.hypot(dx, dy) / half_diag

    def _correspondence(self, spec: LegendSpec) -> float:
        by_id = {g.group_id: g for g in self.groups}
        colors, orders = [], []
        for gid in spec.channel_group_ids:
            ch = by_id[gid].primary()
            if gid not in self._color_cache:
                self._color_cache[gid] = _color_component(ch, self.scene)
                self._order_cache[gid] = order_component(ch, self.scene)
            colors.append(self._color_cache[gid])
            orders.append(self._order_cache[gid])
        if not colors:
            return 0.0
        return float(np.mean(colors) + _shape_component(spec.symbol_type) + np.mean(orders))

    # -- full vector ---------------------------------------------------------

    def evaluate_spec(self, spec: LegendSpec) -> MetricVector:
        entry = self.layer_for(spec)
        fragment: LegendFragment = entry["fragment"]
        from .design import composite

        doc = composite(self.scene, fragment, spec.anchor, spec, self.groups, self.symbols)
        return self.evaluate(doc, entry)

    def evaluate(self, doc: CompositeDocument, entry: dict | None = None) -> MetricVector:
        spec = doc.spec
        if entry is None:
            entry = self.layer_for(spec)
        sc = self.scale
        lb = doc.legend_bbox()
        o_val = self._obstruction((lb[0] * sc, lb[1] * sc, lb[2] * sc, lb[3] * sc))
        i_val = self._ink_balance(spec, entry)
        r_val = _readability(doc, self._mean_color)
        s_val = size_increase(doc.vis_bbox, doc.combined_bbox)
        c_val = self._correspondence(spec)
        ph, pv, pc = _pref_fields(doc)
        mv = MetricVector(o_val, i_val, r_val, s_val, c_val, ph, pv, pc)
        if not mv.all_finite():
            raise NonFiniteInput("metric vector has non-finite fields")
        return mv

"""Legend design space: admissible combinations, rendering, compositing.

A LegendSpec is one point in the five-dimensional space (symbol type, symbol
layout, text layout, multi-legend layout, direction) plus the continuous
anchor position. Rendering produces a fragment of scene elements in local
coordinates with a reserved id prefix, so legends never collide with chart
element ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .channels import ChannelGroup, EncodingChannel
from .errors import InadmissibleSpec
from .geometry import Affine
from .labcolor import lab_to_rgb
from .shapes import bounding_box, element_bbox
from .svgdoc import RGBA, SceneGraph, VisualElement
from .symbols import IconicSymbol

SYMBOL_TYPES = ("semantic", "non_semantic", "data_encoded")
SYMBOL_LAYOUTS = ("continuous", "connected", "nested", "discrete_uniform", "discrete_nonuniform")
TEXT_LAYOUTS = ("as_tick", "accompanying_cross", "accompanying_side", "embedded", "as_symbol", "as_label", "none")
MULTI_LAYOUTS = ("matrix", "flattened", "parallel", "combined", "single")
DIRECTIONS = ("horizontal", "vertical")

LEGEND_ID_PREFIX = "lg:"
SWATCH_SIZE = 12.0
LABEL_FONT = 11.0
PADDING = 4.0
RAMP_BAR_LENGTH = 170.0
RAMP_STOPS = 16
CONNECTED_SEGMENTS = 7
MATRIX_MAX_CARDINALITY = 5
ANCHOR_MARGIN = 0.15  # legends may sit in a band outside the canvas
# direction shapes the footprint strongly: horizontal legends spread items
# wide, vertical ones run a tall pitch, and each direction pads up to a
# minimum card extent so footprints stay consistent across charts
H_ITEM_GAP = 30.0
V_PITCH = 34.0
H_MIN_LENGTH = 210.0
V_MIN_LENGTH = 170.0


@dataclass(frozen=True)
class LegendSpec:
    symbol_type: str
    symbol_layout: str
    text_layout: str
    multi_layout: str
    direction: str
    anchor: tuple[float, float]
    swatch_size: float = SWATCH_SIZE
    text_color: tuple[int, int, int] = (0, 0, 0)
    channel_group_ids: tuple[str, ...] = ()

    def to_record(self) -> dict:
        return {
            "symbol_type": self.symbol_type,
            "symbol_layout": self.symbol_layout,
            "text_layout": self.text_layout,
            "multi_layout": self.multi_layout,
            "direction": self.direction,
            "anchor_x": self.anchor[0],
            "anchor_y": self.anchor[1],
            "swatch_size": self.swatch_size,
            "text_color": "#%02x%02x%02x" % self.text_color,
            "channel_group_ids": list(self.channel_group_ids),
        }

    @staticmethod
    def from_record(rec: dict) -> "LegendSpec":
        tc = rec.get("text_color", "#000000")
        color = (int(tc[1:3], 16), int(tc[3:5], 16), int(tc[5:7], 16))
        return LegendSpec(
            symbol_type=rec["symbol_type"],
            symbol_layout=rec["symbol_layout"],
            text_layout=rec["text_layout"],
            multi_layout=rec["multi_layout"],
            direction=rec["direction"],
            anchor=(float(rec["anchor_x"]), float(rec["anchor_y"])),
            swatch_size=float(rec.get("swatch_size", SWATCH_SIZE)),
            text_color=color,
            channel_group_ids=tuple(rec.get("channel_group_ids", ())),
        )


@dataclass
class DesignConstraints:
    """Admissible options per design dimension for a chart's channel groups."""

    symbol_types: tuple[str, ...]
    symbol_layouts: tuple[str, ...]
    text_layouts: tuple[str, ...]
    multi_layouts: tuple[str, ...]
    directions: tuple[str, ...]
    group_ids: tuple[str, ...]
    per_group_layouts: dict[str, tuple[str, ...]]
    per_group_texts: dict[str, tuple[str, ...]]

    def dimensions(self) -> list[tuple[str, tuple[str, ...]]]:
        return [
            ("symbol_type", self.symbol_types),
            ("symbol_layout", self.symbol_layouts),
            ("text_layout", self.text_layouts),
            ("multi_layout", self.multi_layouts),
            ("direction", self.directions),
        ]

    def admits(self, spec: LegendSpec) -> bool:
        return (
            spec.symbol_type in self.symbol_types
            and spec.symbol_layout in self.symbol_layouts
            and spec.text_layout in self.text_layouts
            and spec.multi_layout in self.multi_layouts
            and spec.direction in self.directions
            and tuple(spec.channel_group_ids) == self.group_ids
        )


def _group_options(group: ChannelGroup) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(symbol_layouts, text_layouts) admissible for one channel group."""
    primary = group.primary()
    if primary.kind == "color":
        if primary.is_continuous():
            return ("continuous", "connected"), ("as_tick",)
        return (
            ("discrete_uniform", "discrete_nonuniform"),
            ("accompanying_cross", "accompanying_side", "embedded", "as_symbol"),
        )
    if primary.kind == "size":
        return ("nested", "discrete_uniform"), ("accompanying_side",)
    return ("discrete_uniform",), ("accompanying_side",)


def valid_space(groups: list[ChannelGroup]) -> DesignConstraints:
    """Admissible design-space combinations for the extracted channel groups."""
    if not groups:
        raise InadmissibleSpec("no channel groups to design for")
    per_layouts = {}
    per_texts = {}
    for g in groups:
        lays, texts = _group_options(g)
        per_layouts[g.group_id] = lays
        per_texts[g.group_id] = texts
    first = groups[0]
    layouts, texts = per_layouts[first.group_id], per_texts[first.group_id]

    if first.primary().kind == "color" and first.primary().is_continuous():
        stypes: tuple[str, ...] = ("non_semantic",)
    else:
        stypes = ("semantic", "non_semantic")

    if len(groups) == 1:
        multis: tuple[str, ...] = ("single",)
    else:
        multis = ("parallel", "combined")
        if len(groups) == 2 and all(
            not g.primary().is_continuous()
            and g.primary().cardinality() <= MATRIX_MAX_CARDINALITY
            for g in groups
        ):
            multis = ("matrix", "flattened") + multis
    return DesignConstraints(
        symbol_types=stypes,
        symbol_layouts=layouts,
        text_layouts=texts,
        multi_layouts=multis,
        directions=DIRECTIONS,
        group_ids=tuple(g.group_id for g in groups),
        per_group_layouts=per_layouts,
        per_group_texts=per_texts,
    )


# --------------------------------------------------------------------------
# fragment rendering


@dataclass
class TextItem:
    color: tuple[int, int, int]
    box: tuple[float, float, float, float]  # local coords
    backdrop: tuple[int, int, int] | None = None  # known swatch fill beneath


@dataclass
class LegendFragment:
    elements: list[VisualElement] = field(default_factory=list)
    width: float = 0.0
    height: float = 0.0
    text_items: list[TextItem] = field(default_factory=list)
    palette_by_group: dict[str, list[tuple[int, int, int]]] = field(default_factory=dict)
    item_count: int = 0
    item_of: dict[str, tuple[str, float]] = field(default_factory=dict)


class _Builder:
    def __init__(self, spec: LegendSpec):
        self.spec = spec
        self.elements: list[VisualElement] = []
        self.text_items: list[TextItem] = []
        self.counter = 0
        self.item_of: dict[str, tuple[str, float]] = {}
        self._item: tuple[str, float] | None = None

    def begin_item(self, group_id: str | None, value: float = 0.0) -> None:
        self._item = None if group_id is None else (group_id, value)

    def next_id(self) -> str:
        self.counter += 1
        eid = f"{LEGEND_ID_PREFIX}{self.counter}"
        if self._item is not None:
            self.item_of[eid] = self._item
        return eid

    def rect(self, x, y, w, h, fill, stroke=None) -> VisualElement:
        el = VisualElement(
            id=self.next_id(), kind="rect",
            geometry={"x": x, "y": y, "width": w, "height": h},
            fill=(*fill, 1.0) if fill else None,
            stroke=(*stroke, 1.0) if stroke else None,
            stroke_width=0.5 if stroke else 0.0,
        )
        self.elements.append(el)
        return el

    def circle(self, cx, cy, r, fill, stroke=None) -> VisualElement:
        el = VisualElement(
            id=self.next_id(), kind="circle", geometry={"cx": cx, "cy": cy, "r": r},
            fill=(*fill, 1.0) if fill else None,
            stroke=(*stroke, 1.0) if stroke else None,
            stroke_width=1.0 if stroke else 0.0,
        )
        self.elements.append(el)
        return el

    def line(self, x1, y1, x2, y2, stroke, width=1.0) -> VisualElement:
        el = VisualElement(
            id=self.next_id(), kind="line",
            geometry={"x1": x1, "y1": y1, "x2": x2, "y2": y2},
            fill=None, stroke=(*stroke, 1.0), stroke_width=width,
        )
        self.elements.append(el)
        return el

    def shape(self, template: VisualElement, x, y, size, fill) -> VisualElement:
        """Scale a representative mark into a size x size box at (x, y)."""
        box = element_bbox(template)
        w = max(box[2] - box[0], 1e-9)
        h = max(box[3] - box[1], 1e-9)
        s = size / max(w, h)
        t = (
            Affine.translate(x + (size - w * s) / 2, y + (size - h * s) / 2)
            @ Affine.scale(s)
            @ Affine.translate(-box[0], -box[1])
            @ template.transform
        )
        el = template.copy()
        el.id = self.next_id()
        el.transform = t
        el.fill = (*fill, 1.0) if fill is not None else el.fill
        if el.stroke is not None and fill is not None:
            el.stroke = None
        el.opacity = 1.0
        self.elements.append(el)
        return el

    def text(self, x, y, content, color, anchor="start", font=LABEL_FONT,
             backdrop=None) -> VisualElement:
        el = VisualElement(
            id=self.next_id(), kind="text", geometry={"x": x, "y": y},
            fill=(*color, 1.0), stroke=None, stroke_width=0.0,
            text_content=content, font_size=font, text_anchor=anchor,
        )
        self.elements.append(el)
        w = 0.6 * font * max(len(content), 1)
        x0 = x - (w / 2 if anchor == "middle" else w if anchor == "end" else 0)
        self.text_items.append(TextItem(color, (x0, y - font, x0 + w, y), backdrop))
        return el


def _label_width(content: str, font: float = LABEL_FONT) -> float:
    return 0.6 * font * max(len(content), 1)


def _group_labels(channel: EncodingChannel) -> list[str]:
    if channel.kind == "color" and not channel.is_continuous():
        return [str(i + 1) for i in range(len(channel.ordered_values))]
    if channel.kind == "rotation":
        return [f"{v:.0f}°" for v in channel.ordered_values]
    return [f"{v:g}" for v in channel.ordered_values]


def _swatch_fills(channel: EncodingChannel) -> list[tuple[int, int, int]]:
    if channel.kind == "color":
        if channel.is_continuous():
            n = len(channel.ramp)
            return [
                lab_to_rgb(channel.ramp[round(i * (n - 1) / (RAMP_STOPS - 1))])
                for i in range(RAMP_STOPS)
            ]
        return [tuple(c) for c in channel.ordered_values]
    return [(120, 120, 120)] * len(channel.ordered_values)


def _representative(symbols: list[IconicSymbol], scene: SceneGraph, symbol_id: str) -> VisualElement | None:
    for sym in symbols:
        if sym.symbol_id == symbol_id:
            return scene.element_by_id(sym.representative_id)
    return None


def _render_discrete(
    b: _Builder, group: ChannelGroup, scene: SceneGraph, symbols: list[IconicSymbol],
    origin: tuple[float, float],
) -> tuple[float, float]:
    spec = b.spec
    ch = group.primary()
    fills = _swatch_fills(ch)
    labels = _group_labels(ch)
    k = len(fills)
    sw = spec.swatch_size
    semantic = spec.symbol_type == "semantic"
    template = _representative(symbols, scene, group.symbol_id) if semantic else None
    vertical = spec.direction == "vertical"
    ox, oy = origin

    counts = [1.0] * k
    if spec.symbol_layout == "discrete_nonuniform":
        tally = {}
        for v in ch.element_map.values():
            tally[int(v)] = tally.get(int(v), 0) + 1
        peak = max(tally.values()) if tally else 1
        counts = [0.6 + 0.8 * tally.get(i, 1) / peak for i in range(k)]

    if spec.text_layout == "embedded":
        width = height = 0.0
        pos = 0.0
        for i in range(k):
            b.begin_item(group.group_id, float(i))
            label = labels[i]
            w = _label_width(label) + 2 * PADDING
            h = max(sw, LABEL_FONT + 2)
            if vertical:
                y = oy + pos
                b.rect(ox, y, w, h, fills[i])
                b.text(ox + w / 2, y + h - (h - LABEL_FONT * 0.8) / 2, label,
                       spec.text_color, anchor="middle", backdrop=fills[i])
                width = max(width, w)
                pos += max(h + PADDING, V_PITCH) * counts[i]
            else:
                x = ox + pos
                b.rect(x, oy, w, h, fills[i])
                b.text(x + w / 2, oy + h - (h - LABEL_FONT * 0.8) / 2, label,
                       spec.text_color, anchor="middle", backdrop=fills[i])
                height = max(height, h)
                pos += (w + H_ITEM_GAP) * counts[i]
        b.begin_item(None)
        if vertical:
            height = pos - PADDING
        else:
            width = pos - PADDING
        return width, height

    if spec.text_layout == "as_symbol":
        pos = 0.0
        width = height = 0.0
        for i in range(k):
            b.begin_item(group.group_id, float(i))
            label = labels[i]
            w = _label_width(label)
            if vertical:
                b.text(ox, oy + pos + LABEL_FONT, label, fills[i])
                width = max(width, w)
                pos += max(LABEL_FONT + PADDING, V_PITCH * 0.85) * counts[i]
            else:
                b.text(ox + pos, oy + LABEL_FONT, label, fills[i])
                height = LABEL_FONT
                pos += (w + H_ITEM_GAP) * counts[i]
        b.begin_item(None)
        if vertical:
            height = pos - PADDING
        else:
            width = pos - PADDING
        return width, height

    # accompanying cross/side and the as_label stub share row geometry
    pitch = max(max(sw, LABEL_FONT) + PADDING, V_PITCH) if vertical else max(sw, LABEL_FONT) + PADDING
    side = spec.text_layout == "accompanying_side"
    label_col = sw + PADDING if vertical else 0.0
    width = height = 0.0
    pos = 0.0
    for i in range(k):
        b.begin_item(group.group_id, float(i))
        label = labels[i]
        step = pitch * counts[i]
        if vertical:
            y = oy + pos
            if semantic and template is not None:
                b.shape(template, ox, y, sw, fills[i])
            else:
                b.rect(ox, y, sw, sw, fills[i])
            tx = ox + (label_col if side else sw + PADDING)
            if spec.text_layout == "as_label":
                b.line(ox + sw, y + sw / 2, tx + PADDING, y + sw / 2, (120, 120, 120), 0.5)
                tx += 2 * PADDING
            b.text(tx, y + sw - (sw - LABEL_FONT * 0.8) / 2, label, spec.text_color)
            width = max(width, tx - ox + _label_width(label))
            pos += step
        else:
            x = ox + pos
            if semantic and template is not None:
                b.shape(template, x, oy, sw, fills[i])
            else:
                b.rect(x, oy, sw, sw, fills[i])
            if side:
                ty = oy + sw + PADDING + LABEL_FONT * 0.8
                b.text(x, ty, label, spec.text_color)
                height = max(height, sw + PADDING + LABEL_FONT)
                pos += max(sw, _label_width(label)) + H_ITEM_GAP
            else:
                b.text(x + sw + PADDING, oy + sw - (sw - LABEL_FONT * 0.8) / 2,
                       label, spec.text_color)
                height = max(height, sw)
                pos += sw + PADDING + _label_width(label) + H_ITEM_GAP
    b.begin_item(None)
    if vertical:
        height = pos - PADDING
    else:
        width = pos - PADDING
    return width, height


def _render_ramp(
    b: _Builder, group: ChannelGroup, origin: tuple[float, float]
) -> tuple[float, float]:
    spec = b.spec
    ch = group.primary()
    fills = _swatch_fills(ch)
    vertical = spec.direction == "vertical"
    sw = spec.swatch_size
    length = RAMP_BAR_LENGTH
    ox, oy = origin
    if spec.symbol_layout == "connected":
        segs = CONNECTED_SEGMENTS
        idxs = [round(i * (len(fills) - 1) / (segs - 1)) for i in range(segs)]
        stops = [fills[i] for i in idxs]
    else:
        stops = fills
    n = len(stops)
    step = length / n
    for i, color in enumerate(stops):
        b.begin_item(group.group_id, i / (n - 1))
        if vertical:
            b.rect(ox, oy + i * step, sw, step + (0.0 if i == n - 1 else 0.01), color)
        else:
            b.rect(ox + i * step, oy, step + (0.0 if i == n - 1 else 0.01), sw, color)
    b.begin_item(None)
    # tick labels at min / mid / max
    ticks = [(0.0, "0"), (0.5, "0.5"), (1.0, "1")]
    if ch.kind in ("size", "rotation"):
        lo, hi = ch.ordered_values[0], ch.ordered_values[-1]
        ticks = [(0.0, f"{lo:g}"), (1.0, f"{hi:g}")]
    for frac, label in ticks:
        if vertical:
            ty = oy + frac * length
            b.line(ox + sw, ty, ox + sw + 3, ty, (60, 60, 60), 0.75)
            b.text(ox + sw + PADDING + 2, ty + LABEL_FONT * 0.35, label, spec.text_color)
        else:
            tx = ox + frac * length
            b.line(tx, oy + sw, tx, oy + sw + 3, (60, 60, 60), 0.75)
            b.text(tx, oy + sw + PADDING + LABEL_FONT, label, spec.text_color,
                   anchor="middle")
    if vertical:
        return sw + PADDING + 2 + 3 * LABEL_FONT * 0.6 + 6, length
    return length + 2 * LABEL_FONT, sw + PADDING + LABEL_FONT + 4


def _render_nested(
    b: _Builder, group: ChannelGroup, scene: SceneGraph, symbols: list[IconicSymbol],
    origin: tuple[float, float],
) -> tuple[float, float]:
    spec = b.spec
    ch = group.primary()
    values = ch.ordered_values
    picks = sorted({values[0], values[len(values) // 2], values[-1]}, reverse=True)
    vmax = max(picks)
    base_r = spec.swatch_size * 1.5
    ox, oy = origin
    cx = ox + base_r
    bottom = oy + 2 * base_r
    for v in picks:  # larger below, smaller above
        r = max(base_r * v / vmax, 1.0)
        b.circle(cx, bottom - r, r, None, stroke=(90, 90, 90))
        b.elements[-1].fill = (200, 200, 200, 0.25)
        label = f"{v:g}"
        b.line(cx, bottom - 2 * r, cx + base_r + PADDING, bottom - 2 * r, (120, 120, 120), 0.5)
        b.text(cx + base_r + 2 * PADDING, bottom - 2 * r + LABEL_FONT * 0.35,
               label, spec.text_color)
    width = base_r * 2 + 2 * PADDING + max(_label_width(f"{v:g}") for v in picks) + PADDING
    return width, 2 * base_r


def _render_matrix(
    b: _Builder, groups: list[ChannelGroup], scene: SceneGraph,
    symbols: list[IconicSymbol], origin: tuple[float, float], flattened: bool,
) -> tuple[float, float]:
    spec = b.spec
    ga, gb = groups[0], groups[1]
    fa = _swatch_fills(ga.primary())
    la = _group_labels(ga.primary())
    vb = gb.primary().ordered_values
    lb = _group_labels(gb.primary())
    sw = spec.swatch_size
    ox, oy = origin
    if flattened:
        pitch = sw + PADDING
        y = oy
        width = 0.0
        for i, ca in enumerate(fa):
            for j, v in enumerate(vb):
                size = sw * (0.5 + 0.5 * (j + 1) / len(vb))
                b.rect(ox + (sw - size) / 2, y + (sw - size) / 2, size, size, ca)
                label = f"{la[i]}/{lb[j]}"
                b.text(ox + sw + PADDING, y + sw - (sw - LABEL_FONT * 0.8) / 2,
                       label, spec.text_color)
                width = max(width, sw + PADDING + _label_width(label))
                y += pitch
        return width, y - oy - PADDING
    # matrix: rows = group A, cols = group B
    pitch = sw + PADDING
    label_w = max(_label_width(l) for l in la) + PADDING
    top = LABEL_FONT + PADDING
    for j, label in enumerate(lb):
        b.text(ox + label_w + j * pitch + sw / 2, oy + LABEL_FONT, label,
               spec.text_color, anchor="middle")
    for i, ca in enumerate(fa):
        y = oy + top + i * pitch
        b.text(ox, y + sw - (sw - LABEL_FONT * 0.8) / 2, la[i], spec.text_color)
        for j in range(len(vb)):
            size = sw * (0.5 + 0.5 * (j + 1) / len(vb))
            b.rect(ox + label_w + j * pitch + (sw - size) / 2, y + (sw - size) / 2,
                   size, size, ca)
    return label_w + len(vb) * pitch - PADDING, top + len(fa) * pitch - PADDING


def render_legend(
    spec: LegendSpec,
    groups: list[ChannelGroup],
    scene: SceneGraph,
    symbols: list[IconicSymbol],
    constraints: DesignConstraints | None = None,
) -> LegendFragment:
    """Render the legend fragment in local coordinates (origin at 0,0)."""
    constraints = constraints or valid_space(groups)
    if not constraints.admits(spec):
        raise InadmissibleSpec(f"spec not admissible: {spec.to_record()}")
    by_id = {g.group_id: g for g in groups}
    ordered_groups = [by_id[g] for g in spec.channel_group_ids]
    b = _Builder(spec)

    def render_group(group: ChannelGroup, origin: tuple[float, float]) -> tuple[float, float]:
        layouts = constraints.per_group_layouts[group.group_id]
        layout = spec.symbol_layout if spec.symbol_layout in layouts else layouts[0]
        sub_spec = replace(spec, symbol_layout=layout)
        texts = constraints.per_group_texts[group.group_id]
        sub_spec = replace(
            sub_spec,
            text_layout=spec.text_layout if spec.text_layout in texts else texts[0],
        )
        saved = b.spec
        b.spec = sub_spec
        try:
            if layout in ("continuous", "connected"):
                return _render_ramp(b, group, origin)
            if layout == "nested":
                return _render_nested(b, group, scene, symbols, origin)
            return _render_discrete(b, group, scene, symbols, origin)
        finally:
            b.spec = saved

    if spec.multi_layout in ("matrix", "flattened"):
        w, h = _render_matrix(b, ordered_groups, scene, symbols, (0.0, 0.0),
                              flattened=spec.multi_layout == "flattened")
    elif spec.multi_layout == "single":
        w, h = render_group(ordered_groups[0], (0.0, 0.0))
    else:
        # parallel stacks perpendicular to direction; combined stacks along it
        gap = 12.0 if spec.multi_layout == "parallel" else 8.0
        perpendicular = spec.multi_layout == "parallel"
        stack_vertically = (spec.direction == "horizontal") == perpendicular
        w = h = 0.0
        cursor = 0.0
        for g in ordered_groups:
            if stack_vertically:
                gw, gh = render_group(g, (0.0, cursor))
                cursor += gh + gap
                w = max(w, gw)
                h = cursor - gap
            else:
                gw, gh = render_group(g, (cursor, 0.0))
                cursor += gw + gap
                h = max(h, gh)
                w = cursor - gap

    # pad to the per-direction card minimum
    if spec.direction == "horizontal":
        w = max(w, H_MIN_LENGTH)
    else:
        h = max(h, V_MIN_LENGTH)

    palette = {}
    for g in ordered_groups:
        ch = g.primary()
        if ch.kind == "color":
            if ch.is_continuous():
                palette[g.group_id] = [tuple(c) for c in ch.ordered_values]
            else:
                palette[g.group_id] = [tuple(c) for c in ch.ordered_values]
    items = sum(
        len(g.primary().ordered_values) if not g.primary().is_continuous() else RAMP_STOPS
        for g in ordered_groups
    )
    return LegendFragment(
        elements=b.elements,
        width=w,
        height=h,
        text_items=b.text_items,
        palette_by_group=palette,
        item_count=items,
        item_of=b.item_of,
    )


# --------------------------------------------------------------------------
# compositing


@dataclass
class CompositeDocument:
    scene: SceneGraph
    fragment: LegendFragment
    spec: LegendSpec
    groups: list[ChannelGroup]
    symbols: list[IconicSymbol]
    combined_bbox: tuple[float, float, float, float]
    vis_bbox: tuple[float, float, float, float]
    # interaction reversal records
    restore_opacity: dict[str, float] = field(default_factory=dict)
    restore_paint: dict[str, dict] = field(default_factory=dict)
    restore_fill_stroke: dict[str, tuple] = field(default_factory=dict)

    def legend_bbox(self) -> tuple[float, float, float, float]:
        x, y = self.spec.anchor
        return (x, y, x + self.fragment.width, y + self.fragment.height)

    def to_scene(self) -> SceneGraph:
        """Standalone scene: chart plus legend, canvas grown to fit overhang."""
        x0 = min(0.0, self.combined_bbox[0])
        y0 = min(0.0, self.combined_bbox[1])
        w = max(self.scene.canvas_width, self.combined_bbox[2]) - x0
        h = max(self.scene.canvas_height, self.combined_bbox[3]) - y0
        shift = Affine.translate(-x0, -y0)
        anchor_t = shift @ Affine.translate(*self.spec.anchor)
        elements = []
        for el in self.scene.elements:
            moved = el.copy()
            moved.transform = shift @ el.transform
            elements.append(moved)
        for el in self.fragment.elements:
            moved = el.copy()
            moved.transform = anchor_t @ el.transform
            elements.append(moved)
        return SceneGraph(w, h, elements)


def composite(
    scene: SceneGraph,
    fragment: LegendFragment,
    anchor: tuple[float, float],
    spec: LegendSpec,
    groups: list[ChannelGroup],
    symbols: list[IconicSymbol],
) -> CompositeDocument:
    spec = replace(spec, anchor=anchor)
    vis = bounding_box(scene.elements) if scene.elements else (0, 0, scene.canvas_width, scene.canvas_height)
    legend_box = (anchor[0], anchor[1], anchor[0] + fragment.width, anchor[1] + fragment.height)
    combined = (
        min(vis[0], legend_box[0]),
        min(vis[1], legend_box[1]),
        max(vis[2], legend_box[2]),
        max(vis[3], legend_box[3]),
    )
    return CompositeDocument(
        scene=scene, fragment=fragment, spec=spec, groups=groups,
        symbols=symbols, combined_bbox=combined, vis_bbox=vis,
    )

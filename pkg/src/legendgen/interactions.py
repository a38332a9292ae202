"""Two-way legend interactions: highlight, retrieve, retarget.

All transforms return a new CompositeDocument; originals are recorded so
every transform is exactly reversible, byte for byte after serialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace

from .channels import ChannelGroup, EncodingChannel
from .design import CompositeDocument
from .errors import CardinalityMismatch, NotAMark, UnknownSelection
from .svgdoc import RGBA, SceneGraph

DIM_OPACITY = 0.2

Selection = int | tuple[float, float]


def _group(doc: CompositeDocument, group_id: str) -> ChannelGroup:
    for g in doc.groups:
        if g.group_id == group_id:
            return g
    raise UnknownSelection(f"unknown channel group {group_id!r}")


def _selected_ids(ch: EncodingChannel, selection: Selection) -> set[str]:
    if isinstance(selection, tuple):
        lo, hi = selection
        return {mid for mid, v in ch.element_map.items() if lo <= v <= hi}
    if not ch.is_continuous():
        k = int(selection)
        if not 0 <= k < len(ch.ordered_values):
            raise UnknownSelection(f"category index {k} out of range")
        return {mid for mid, v in ch.element_map.items() if int(v) == k}
    raise UnknownSelection("continuous channels need a (lo, hi) range")


def highlight(doc: CompositeDocument, group_id: str, selection: Selection) -> CompositeDocument:
    """Dim every non-selected member element (and non-matching legend item)
    to opacity 0.2; stores the original opacities for exact reversal."""
    group = _group(doc, group_id)
    ch = group.primary()
    selected = _selected_ids(ch, selection)
    restore: dict[str, float] = {}
    scene = doc.scene.copy()
    for el in scene.elements:
        if el.id in ch.element_map and el.id not in selected:
            restore[el.id] = el.opacity
            el.opacity = DIM_OPACITY
    fragment = _copy_fragment(doc.fragment)
    frag_restore: dict[str, float] = {}
    for el in fragment.elements:
        key = fragment_item_of(doc, el.id)
        if key is None or key[0] != group_id:
            continue
        keep = _item_selected(ch, key[1], selection)
        if not keep:
            frag_restore[el.id] = el.opacity
            el.opacity = DIM_OPACITY
    out = dc_replace(doc, scene=scene, fragment=fragment)
    out.restore_opacity = {**restore, **frag_restore}
    return out


def _item_selected(ch: EncodingChannel, item: float, selection: Selection) -> bool:
    if isinstance(selection, tuple):
        lo, hi = selection
        return lo <= item <= hi
    return int(item) == int(selection)


def unhighlight(doc: CompositeDocument) -> CompositeDocument:
    restore = getattr(doc, "restore_opacity", None)
    if not restore:
        return doc
    scene = doc.scene.copy()
    for el in scene.elements:
        if el.id in restore:
            el.opacity = restore[el.id]
    fragment = _copy_fragment(doc.fragment)
    for el in fragment.elements:
        if el.id in restore:
            el.opacity = restore[el.id]
    out = dc_replace(doc, scene=scene, fragment=fragment)
    out.restore_opacity = {}
    return out


def _copy_fragment(fragment):
    from .design import LegendFragment

    return LegendFragment(
        elements=[e.copy() for e in fragment.elements],
        width=fragment.width,
        height=fragment.height,
        text_items=list(fragment.text_items),
        palette_by_group=dict(fragment.palette_by_group),
        item_count=fragment.item_count,
        item_of=dict(getattr(fragment, "item_of", {})),
    )


def fragment_item_of(doc: CompositeDocument, element_id: str):
    return getattr(doc.fragment, "item_of", {}).get(element_id)


# --------------------------------------------------------------------------
# retrieve


def retrieve(doc: CompositeDocument, element_id: str) -> tuple[str, float]:
    """Legend annotation position for a chart element: (group id, item index
    for discrete channels or normalized ramp position for continuous ones)."""
    for group in doc.groups:
        ch = group.primary()
        if element_id in ch.element_map:
            return (group.group_id, float(ch.element_map[element_id]))
    raise NotAMark(f"element {element_id!r} belongs to no legend channel")


# --------------------------------------------------------------------------
# retarget


def _interp_palette(stops: list[tuple[int, int, int]], t: float) -> tuple[int, int, int]:
    if len(stops) == 1:
        return tuple(stops[0])
    t = min(max(t, 0.0), 1.0) * (len(stops) - 1)
    i = min(int(t), len(stops) - 2)
    frac = t - i
    a, b = stops[i], stops[i + 1]
    return tuple(int(round(a[k] * (1 - frac) + b[k] * frac)) for k in range(3))


def retarget(
    doc: CompositeDocument,
    group_id: str,
    replacement: list[tuple[int, int, int]],
    render_fn=None,
) -> CompositeDocument:
    """Rewrite member paints through the channel mapping: categorical palettes
    swap bijectively by index, continuous ramps resample by position. The
    previous paints are recorded so retargeting back restores them exactly."""
    group = _group(doc, group_id)
    ch = group.primary()
    if ch.kind != "color":
        raise CardinalityMismatch("retarget applies to color channels")
    replacement = [tuple(c) for c in replacement]
    if not ch.is_continuous():
        if len(replacement) != len(ch.ordered_values):
            raise CardinalityMismatch(
                f"replacement has {len(replacement)} colors, channel has {len(ch.ordered_values)}"
            )
        if replacement == [tuple(c) for c in ch.ordered_values]:
            return doc
        mapping = {i: replacement[i] for i in range(len(replacement))}
    else:
        if len(replacement) < 2:
            raise CardinalityMismatch("continuous retarget needs a ramp of >= 2 colors")
        if replacement == [tuple(c) for c in ch.ordered_values]:
            return doc

    prior = getattr(doc, "restore_paint", {}).get(group_id)
    restoring = prior is not None and replacement == prior["original_values"]
    scene = doc.scene.copy()
    paints: dict[str, tuple[RGBA | None, RGBA | None]] = {}
    for el in scene.elements:
        if el.id not in ch.element_map:
            continue
        paints[el.id] = (el.fill, el.stroke)
        if restoring:
            el.fill, el.stroke = prior["paints"][el.id]
            continue
        v = ch.element_map[el.id]
        new_rgb = (
            _interp_palette(replacement, v) if ch.is_continuous() else mapping[int(v)]
        )
        if el.fill is not None:
            el.fill = (*new_rgb, el.fill[3])
        elif el.stroke is not None:
            el.stroke = (*new_rgb, el.stroke[3])

    new_values = replacement
    new_ch = dc_replace(ch, ordered_values=[tuple(c) for c in new_values])
    if ch.is_continuous():
        from .channels import interpolate_ramp
        from .labcolor import rgb_to_lab

        new_ch = dc_replace(new_ch, ramp=interpolate_ramp(
            [rgb_to_lab(c) for c in new_ch.ordered_values], len(ch.ramp or []) or 512
        ))
    new_group = ChannelGroup(group.group_id, group.symbol_id, [
        new_ch if c.channel_id == ch.channel_id else c for c in group.channels
    ])
    groups = [new_group if g.group_id == group_id else g for g in doc.groups]

    fragment = doc.fragment
    if render_fn is not None:
        fragment = render_fn(doc.spec, groups)
    out = dc_replace(doc, scene=scene, groups=groups, fragment=fragment)
    out.restore_paint = dict(getattr(doc, "restore_paint", {}))
    if restoring:
        out.restore_paint.pop(group_id, None)
    else:
        out.restore_paint[group_id] = {
            "original_values": prior["original_values"] if prior is not None
            else [tuple(c) for c in ch.ordered_values],
            "paints": prior["paints"] if prior is not None else paints,
        }
    return out


def fill_to_stroke(doc: CompositeDocument, group_id: str) -> CompositeDocument:
    """Area-to-line restyle: stroke takes each member's fill color, fill goes
    to none. Reversible via the recorded original paints."""
    group = _group(doc, group_id)
    ch = group.primary()
    scene = doc.scene.copy()
    paints = {}
    for el in scene.elements:
        if el.id not in ch.element_map or el.fill is None:
            continue
        paints[el.id] = (el.fill, el.stroke, el.stroke_width)
        el.stroke = el.fill
        el.fill = None
        el.stroke_width = max(el.stroke_width, 1.5)
    out = dc_replace(doc, scene=scene)
    out.restore_fill_stroke = paints
    return out


def restore_fill(doc: CompositeDocument) -> CompositeDocument:
    record = getattr(doc, "restore_fill_stroke", None)
    if not record:
        return doc
    scene = doc.scene.copy()
    for el in scene.elements:
        if el.id in record:
            el.fill, el.stroke, el.stroke_width = record[el.id]
    out = dc_replace(doc, scene=scene)
    out.restore_fill_stroke = {}
    return out

import pytest

from legendgen.design import LegendSpec
from legendgen.errors import CardinalityMismatch, NotAMark, UnknownSelection
from legendgen.fixtures import area_chart, choropleth_chart, stacked_bar_chart
from legendgen.interactions import (
    fill_to_stroke,
    highlight,
    restore_fill,
    retarget,
    retrieve,
    unhighlight,
)
from legendgen.pipeline import Document
from legendgen.svgdoc import scene_to_svg


def composed(svg_text: str):
    doc = Document.from_svg(svg_text)
    c = doc.constraints
    spec = LegendSpec(
        symbol_type=c.symbol_types[0],
        symbol_layout=c.symbol_layouts[0],
        text_layout=c.text_layouts[0],
        multi_layout=c.multi_layouts[0],
        direction="vertical",
        anchor=(doc.scene.canvas_width - 60.0, 20.0),
        channel_group_ids=c.group_ids,
    )
    return doc, doc.compose(spec)


def doc_svg(comp) -> str:
    return scene_to_svg(comp.to_scene())


# --------------------------------------------------------------------------
# highlight


def test_highlight_dims_only_other_categories():
    doc, comp = composed(stacked_bar_chart(0))
    gid = doc.constraints.group_ids[0]
    ch = doc.legend_groups[0].primary()
    lit = highlight(comp, gid, 2)
    members2 = {m for m, v in ch.element_map.items() if int(v) == 2}
    for el in lit.scene.elements:
        if el.id in members2:
            assert el.opacity == 1.0
        elif el.id in ch.element_map:
            assert el.opacity == 0.2
        else:
            assert el.opacity == 1.0


def test_highlight_unhighlight_byte_identical():
    doc, comp = composed(stacked_bar_chart(0))
    gid = doc.constraints.group_ids[0]
    before = doc_svg(comp)
    lit = highlight(comp, gid, 1)
    assert doc_svg(lit) != before
    back = unhighlight(lit)
    assert doc_svg(back) == before


def test_full_range_highlight_changes_nothing():
    doc, comp = composed(choropleth_chart(0))
    gid = doc.constraints.group_ids[0]
    lit = highlight(comp, gid, (0.0, 1.0))
    assert doc_svg(lit) == doc_svg(comp)


def test_brush_range_on_ramp():
    doc, comp = composed(choropleth_chart(0))
    gid = doc.constraints.group_ids[0]
    ch = doc.legend_groups[0].primary()
    lit = highlight(comp, gid, (0.4, 0.6))
    for el in lit.scene.elements:
        if el.id in ch.element_map:
            pos = ch.element_map[el.id]
            expected = 1.0 if 0.4 <= pos <= 0.6 else 0.2
            assert el.opacity == expected


def test_unknown_selection_errors():
    doc, comp = composed(stacked_bar_chart(0))
    gid = doc.constraints.group_ids[0]
    with pytest.raises(UnknownSelection):
        highlight(comp, gid, 99)
    with pytest.raises(UnknownSelection):
        highlight(comp, "nope", 0)


# --------------------------------------------------------------------------
# retrieve


def test_retrieve_discrete_index():
    doc, comp = composed(stacked_bar_chart(0))
    ch = doc.legend_groups[0].primary()
    member, value = next(iter(ch.element_map.items()))
    gid, got = retrieve(comp, member)
    assert gid == doc.constraints.group_ids[0]
    assert got == value


def test_retrieve_continuous_position():
    doc, comp = composed(choropleth_chart(0))
    ch = doc.legend_groups[0].primary()
    member, pos = max(ch.element_map.items(), key=lambda kv: kv[1])
    _, got = retrieve(comp, member)
    assert got == pytest.approx(pos, abs=1 / 511)


def test_retrieve_non_mark_errors():
    doc, comp = composed(stacked_bar_chart(0))
    axis_ids = [e.id for e in doc.scene.elements if e.kind == "line"]
    with pytest.raises(NotAMark):
        retrieve(comp, axis_ids[0])


# --------------------------------------------------------------------------
# retarget


def test_categorical_retarget_bijective():
    doc, comp = composed(stacked_bar_chart(0))
    gid = doc.constraints.group_ids[0]
    ch = doc.legend_groups[0].primary()
    old = [tuple(c) for c in ch.ordered_values]
    new = [(10, 10, 10), (60, 60, 60), (120, 120, 120), (200, 200, 200)]
    swapped = retarget(comp, gid, new)
    for el in swapped.scene.elements:
        if el.id in ch.element_map:
            assert el.fill[:3] == new[int(ch.element_map[el.id])]
    back = retarget(swapped, gid, old)
    assert doc_svg(back) == doc_svg(comp)


def test_identity_retarget_noop():
    doc, comp = composed(stacked_bar_chart(0))
    gid = doc.constraints.group_ids[0]
    ch = doc.legend_groups[0].primary()
    same = retarget(comp, gid, [tuple(c) for c in ch.ordered_values])
    assert doc_svg(same) == doc_svg(comp)


def test_cardinality_mismatch():
    doc, comp = composed(stacked_bar_chart(0))
    gid = doc.constraints.group_ids[0]
    with pytest.raises(CardinalityMismatch):
        retarget(comp, gid, [(0, 0, 0)])


def test_continuous_retarget_round_trip():
    doc, comp = composed(choropleth_chart(0))
    gid = doc.constraints.group_ids[0]
    ch = doc.legend_groups[0].primary()
    old = [tuple(c) for c in ch.ordered_values]
    purple = [(245, 240, 255), (180, 150, 220), (90, 40, 160), (40, 0, 80)]
    swapped = retarget(comp, gid, purple)
    changed = sum(
        1 for a, b in zip(comp.scene.elements, swapped.scene.elements)
        if a.fill != b.fill
    )
    assert changed > 30
    back = retarget(swapped, gid, old)
    assert doc_svg(back) == doc_svg(comp)


def test_fill_to_stroke_line_chart_restyle():
    doc, comp = composed(area_chart(0))
    gid = doc.constraints.group_ids[0]
    ch = doc.legend_groups[0].primary()
    before = doc_svg(comp)
    lined = fill_to_stroke(comp, gid)
    for orig, new in zip(comp.scene.elements, lined.scene.elements):
        if orig.id in ch.element_map:
            assert new.fill is None
            assert new.stroke == orig.fill
        else:
            assert new.fill == orig.fill
    assert doc_svg(restore_fill(lined)) == before

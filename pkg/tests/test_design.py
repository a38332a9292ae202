import pytest

from legendgen.design import (
    LEGEND_ID_PREFIX,
    RAMP_STOPS,
    LegendSpec,
    valid_space,
)
from legendgen.errors import InadmissibleSpec
from legendgen.fixtures import choropleth_chart, scatter_chart, stacked_bar_chart
from legendgen.pipeline import Document
from legendgen.svgdoc import scene_to_svg


def doc_of(svg: str) -> Document:
    return Document.from_svg(svg)


def make_spec(doc: Document, **overrides) -> LegendSpec:
    c = doc.constraints
    base = dict(
        symbol_type=c.symbol_types[0],
        symbol_layout=c.symbol_layouts[0],
        text_layout=c.text_layouts[0],
        multi_layout=c.multi_layouts[0],
        direction="vertical",
        anchor=(10.0, 10.0),
        channel_group_ids=c.group_ids,
    )
    base.update(overrides)
    return LegendSpec(**base)


# --------------------------------------------------------------------------
# valid_space


def test_categorical_channel_space():
    doc = doc_of(stacked_bar_chart(0))
    c = doc.constraints
    assert set(c.symbol_layouts) == {"discrete_uniform", "discrete_nonuniform"}
    assert set(c.text_layouts) == {
        "accompanying_cross", "accompanying_side", "embedded", "as_symbol",
    }
    assert c.multi_layouts == ("single",)
    assert set(c.symbol_types) == {"semantic", "non_semantic"}


def test_continuous_channel_space():
    doc = doc_of(choropleth_chart(0))
    c = doc.constraints
    assert set(c.symbol_layouts) == {"continuous", "connected"}
    assert c.text_layouts == ("as_tick",)
    assert c.symbol_types == ("non_semantic",)


def test_nested_only_for_size_channels():
    # bubble-style chart: circles of varying radius, one color
    body = "".join(
        f'<circle cx="{30 + i * 30}" cy="60" r="{4 + i}" fill="#52a06e"/>' for i in range(8)
    )
    doc = doc_of(f'<svg width="280" height="120">{body}</svg>')
    assert doc.constraints.group_ids  # size channel carried the fallback
    assert "nested" in doc.constraints.symbol_layouts
    cat = doc_of(stacked_bar_chart(0))
    assert "nested" not in cat.constraints.symbol_layouts


# --------------------------------------------------------------------------
# rendering


def test_discrete_vertical_rows_evenly_pitched():
    doc = doc_of(stacked_bar_chart(0))
    spec = make_spec(doc, symbol_layout="discrete_uniform",
                     text_layout="accompanying_cross", direction="vertical")
    frag = doc.render(spec)
    swatches = [e for e in frag.elements if e.kind == "rect"]
    texts = [e for e in frag.elements if e.kind == "text"]
    assert len(swatches) == 4
    assert len(texts) == 4
    ys = [s.geometry["y"] for s in swatches]
    pitches = [round(b - a, 6) for a, b in zip(ys, ys[1:])]
    assert len(set(pitches)) == 1  # equal vertical pitch


def test_continuous_ramp_with_ticks():
    doc = doc_of(choropleth_chart(0))
    spec = make_spec(doc, symbol_layout="continuous", text_layout="as_tick",
                     direction="horizontal")
    frag = doc.render(spec)
    stops = [e for e in frag.elements if e.kind == "rect"]
    labels = [e for e in frag.elements if e.kind == "text"]
    assert len(stops) == RAMP_STOPS
    assert len(labels) >= 2
    # stops butt against each other along x
    xs = sorted(s.geometry["x"] for s in stops)
    widths = {round(s.geometry["width"], 3) for s in stops}
    assert len(widths) <= 2
    assert xs == sorted(xs)


def test_single_category_degenerate():
    body = "".join(
        f'<rect x="{10 + i * 20}" y="10" width="12" height="30" fill="#aa3344"/>' for i in range(4)
    )
    body += "".join(
        f'<rect x="{10 + i * 20}" y="60" width="12" height="30" fill="#3344aa"/>' for i in range(4)
    )
    doc = doc_of(f'<svg width="120" height="110">{body}</svg>')
    spec = make_spec(doc, symbol_layout="discrete_uniform", text_layout="accompanying_cross")
    frag = doc.render(spec)
    assert len([e for e in frag.elements if e.kind == "rect"]) == 2


def test_inadmissible_spec_rejected():
    doc = doc_of(stacked_bar_chart(0))
    bad = make_spec(doc, symbol_layout="continuous", text_layout="as_tick")
    with pytest.raises(InadmissibleSpec):
        doc.render(bad)


def test_legend_ids_reserved_prefix_and_isolation():
    doc = doc_of(stacked_bar_chart(0))
    spec = make_spec(doc)
    comp = doc.compose(spec)
    chart_ids = {e.id for e in comp.scene.elements}
    for el in comp.fragment.elements:
        assert el.id.startswith(LEGEND_ID_PREFIX)
        assert el.id not in chart_ids
    # compositing leaves the chart untouched
    assert scene_to_svg(comp.scene) == scene_to_svg(doc.scene)


def test_composite_inside_no_growth():
    doc = doc_of(stacked_bar_chart(0))
    spec = make_spec(doc, anchor=(150.0, 40.0))
    comp = doc.compose(spec)
    assert comp.combined_bbox == comp.vis_bbox
    mv = doc.metrics_for(spec, fast=False)
    assert mv.size_increase == 0.0


def test_composite_edge_overhang_widens_bbox():
    doc = doc_of(stacked_bar_chart(0))
    spec = make_spec(doc, anchor=(doc.scene.canvas_width - 4.0, 40.0))
    comp = doc.compose(spec)
    assert comp.combined_bbox[2] > comp.vis_bbox[2]
    assert comp.combined_bbox[2] == pytest.approx(
        doc.scene.canvas_width - 4.0 + comp.fragment.width
    )


def test_composite_idempotent_regeneration():
    doc = doc_of(stacked_bar_chart(0))
    spec = make_spec(doc, anchor=(100.0, 50.0))
    a = scene_to_svg(doc.compose(spec).to_scene())
    b = scene_to_svg(doc.compose(spec).to_scene())
    assert a == b


def test_embedded_text_backdrop_is_swatch_fill():
    doc = doc_of(stacked_bar_chart(0))
    spec = make_spec(doc, text_layout="embedded")
    frag = doc.render(spec)
    palettes = frag.palette_by_group[doc.constraints.group_ids[0]]
    backdrops = [t.backdrop for t in frag.text_items]
    assert backdrops == [tuple(c) for c in palettes]


def test_item_count_matches_cardinality():
    doc = doc_of(stacked_bar_chart(0))
    for layout in ("discrete_uniform", "discrete_nonuniform"):
        frag = doc.render(make_spec(doc, symbol_layout=layout))
        swatches = [e for e in frag.elements if e.kind != "text"]
        assert len(swatches) == 4


def test_spec_record_round_trip():
    doc = doc_of(stacked_bar_chart(0))
    spec = make_spec(doc, anchor=(12.5, 80.25), text_color=(10, 20, 30))
    rec = spec.to_record()
    back = LegendSpec.from_record(rec)
    assert back == spec

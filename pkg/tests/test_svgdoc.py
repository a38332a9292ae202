import math
from xml.etree import ElementTree

import pytest

from legendgen.errors import MalformedDocument
from legendgen.svgdoc import (
    parse_color,
    parse_svg,
    parse_transform,
    scene_to_svg,
)


def test_single_rect_attribute_echo():
    scene = parse_svg('<svg width="10" height="10"><rect x="1" y="1" width="2" height="3"/></svg>')
    assert scene.canvas_width == 10
    assert scene.canvas_height == 10
    assert len(scene.elements) == 1
    el = scene.elements[0]
    assert el.kind == "rect"
    assert el.geometry == {"x": 1.0, "y": 1.0, "width": 2.0, "height": 3.0}


def test_group_transform_composition():
    scene = parse_svg(
        '<svg width="20" height="20">'
        '<g transform="translate(5,0)"><rect x="1" y="0" width="2" height="2"/></g>'
        "</svg>"
    )
    el = scene.elements[0]
    assert el.transform.apply(el.geometry["x"], el.geometry["y"]) == (6.0, 0.0)


def bar_chart_svg(bars: int = 12) -> str:
    parts = [f'<svg width="300" height="200">']
    parts.append('<line x1="30" y1="180" x2="290" y2="180" stroke="black"/>')
    parts.append('<line x1="30" y1="10" x2="30" y2="180" stroke="black"/>')
    for i in range(bars):
        h = 20 + 10 * i
        parts.append(
            f'<rect x="{35 + i * 20}" y="{180 - h}" width="14" height="{h}" fill="#4682b4"/>'
        )
        parts.append(f'<text x="{42 + i * 20}" y="192" font-size="8">{i}</text>')
    parts.append("</svg>")
    return "".join(parts)


def test_bar_fixture_counts_match_independent_walker():
    text = bar_chart_svg()
    scene = parse_svg(text)
    # independent oracle: raw XML tag counts
    root = ElementTree.fromstring(text)
    expected = {"rect": 0, "line": 0, "text": 0}
    for node in root.iter():
        tag = node.tag.rsplit("}", 1)[-1]
        if tag in expected:
            expected[tag] += 1
    got = {"rect": 0, "line": 0, "text": 0}
    for el in scene.elements:
        got[el.kind] += 1
    assert got == expected == {"rect": 12, "line": 2, "text": 12}
    # paint order preserved: lines first, then rect/text pairs
    assert [e.kind for e in scene.elements[:2]] == ["line", "line"]
    assert scene.elements[2].kind == "rect"


def test_malformed_xml_raises():
    with pytest.raises(MalformedDocument):
        parse_svg("<svg width='10'")
    with pytest.raises(MalformedDocument):
        parse_svg("<div/>")
    with pytest.raises(MalformedDocument):
        parse_svg("<svg><rect/></svg>")  # no size


def test_unsupported_features_warn_not_fail():
    scene = parse_svg(
        '<svg width="10" height="10">'
        '<image href="x.png" width="5" height="5"/>'
        '<rect x="0" y="0" width="1" height="1" fill="color-mix(red, blue)"/>'
        '<rect x="2" y="2" width="1" height="1" fill="color-mix(red, blue)" stroke="black"/>'
        "</svg>"
    )
    # image skipped, unpaintable rect skipped, stroked rect survives
    assert [e.kind for e in scene.elements] == ["rect"]
    assert scene.elements[0].fill is None
    assert len(scene.warnings) >= 3


def test_viewbox_scaling():
    scene = parse_svg('<svg width="100" height="100" viewBox="0 0 10 10"><rect x="1" y="1" width="2" height="2"/></svg>')
    el = scene.elements[0]
    assert el.transform.apply(1, 1) == (10.0, 10.0)


def test_color_forms():
    assert parse_color("#f00") == (255, 0, 0, 1.0)
    assert parse_color("#4682b4") == (70, 130, 180, 1.0)
    assert parse_color("rgb(1, 2, 3)") == (1, 2, 3, 1.0)
    assert parse_color("rgba(10, 20, 30, 0.5)") == (10, 20, 30, 0.5)
    assert parse_color("steelblue") == (70, 130, 180, 1.0)
    assert parse_color("none") is None
    assert parse_color("url(#grad)") == "unsupported"


def test_named_color_count():
    from legendgen.csscolors import NAMED_COLORS

    assert len(NAMED_COLORS) == 148


def test_gradient_fill_resolves_to_mean_color():
    scene = parse_svg(
        '<svg width="10" height="10">'
        "<defs><linearGradient id='g'>"
        "<stop offset='0' stop-color='#000000'/><stop offset='1' stop-color='#ffffff'/>"
        "</linearGradient></defs>"
        '<rect x="0" y="0" width="5" height="5" fill="url(#g)"/>'
        "</svg>"
    )
    assert scene.elements[0].fill == (128, 128, 128, 1.0)


def test_transform_parsing_forms():
    t = parse_transform("translate(3 4) scale(2) rotate(90)")
    x, y = t.apply(1, 0)
    assert x == pytest.approx(3.0, abs=1e-9)
    assert y == pytest.approx(6.0, abs=1e-9)
    m = parse_transform("matrix(1 0 0 1 7 8)")
    assert m.apply(0, 0) == (7.0, 8.0)


def test_default_fill_is_black():
    scene = parse_svg('<svg width="10" height="10"><rect x="0" y="0" width="1" height="1"/></svg>')
    assert scene.elements[0].fill == (0, 0, 0, 1.0)


def _scene_numbers(scene):
    out = []
    for el in scene.elements:
        if el.kind == "path":
            for sp in el.geometry["subpaths"]:
                for seg in sp.segments:
                    out.extend(v for v in seg[1:] if isinstance(v, float))
        else:
            out.extend(float(v) for v in el.geometry.values())
        out.extend(el.transform)
    return out


def test_serialize_round_trip_numeric_fidelity():
    text = (
        '<svg width="50" height="40">'
        '<g transform="translate(2.5,1.25) rotate(15)">'
        '<path d="M1.5 2.25 C3 4 5 6 7.125 8.5 L9 10 Z" fill="#ff0000"/></g>'
        '<circle cx="20.125" cy="10.5" r="3.75" fill="steelblue" stroke="#000000" stroke-width="0.5"/>'
        '<text x="5" y="35" font-size="9.5">hello</text>'
        "</svg>"
    )
    first = parse_svg(text)
    second = parse_svg(scene_to_svg(first))
    a, b = _scene_numbers(first), _scene_numbers(second)
    assert len(a) == len(b)
    for va, vb in zip(a, b):
        assert vb == pytest.approx(va, abs=1e-6)


def test_serialize_is_stable():
    text = bar_chart_svg()
    scene = parse_svg(text)
    once = scene_to_svg(scene)
    again = scene_to_svg(parse_svg(once))
    assert once == again

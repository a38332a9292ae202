import math

import pytest
from hypothesis import given, settings, strategies as st

from legendgen.errors import NoSymbolsFound
from legendgen.geometry import Affine, Polygon
from legendgen.shapes import flatten_path
from legendgen.svgdoc import parse_svg
from legendgen.symbols import (
    FuzzyClusterParams,
    centroid_vertices_descriptor,
    descriptor_match,
    exact_match_groups,
    extract_symbols,
    fuzzy_cluster,
    transformed_match_groups,
)


def svg(body: str, w: int = 200, h: int = 150) -> str:
    return f'<svg width="{w}" height="{h}">{body}</svg>'


# --------------------------------------------------------------------------
# exact matching


def test_identical_rects_form_one_symbol():
    body = "".join(
        f'<rect x="{10 + i * 15}" y="20" width="10" height="40" fill="#123456"/>'
        for i in range(12)
    )
    syms = exact_match_groups(parse_svg(svg(body)).elements)
    assert len(syms) == 1
    assert len(syms[0].member_ids) == 12
    assert syms[0].match_stage == "exact"
    assert all(ch.scale_factor == 1.0 for ch in syms[0].shape_channels.values())


def test_varying_height_rects_group_with_size_channel():
    body = "".join(
        f'<rect x="{10 + i * 15}" y="{150 - 10 * (i + 2)}" width="10" height="{10 * (i + 2)}" fill="#123456"/>'
        for i in range(12)
    )
    syms = exact_match_groups(parse_svg(svg(body)).elements)
    assert len(syms) == 1
    sym = syms[0]
    assert len(sym.member_ids) == 12
    rep_h = 10 * 2  # first member's height
    for i, mid in enumerate(sym.member_ids):
        expected = 10 * (i + 2) / rep_h
        assert sym.shape_channels[mid].scale_factor == pytest.approx(expected)


def test_two_rects_below_threshold_no_symbol():
    body = (
        '<rect x="0" y="0" width="5" height="5" fill="#000000"/>'
        '<rect x="20" y="0" width="5" height="5" fill="#000000"/>'
    )
    assert exact_match_groups(parse_svg(svg(body)).elements) == []


def test_lines_group_with_rotation_and_scale():
    body = (
        '<line x1="0" y1="0" x2="10" y2="0" stroke="#333333"/>'
        '<line x1="50" y1="50" x2="50" y2="70" stroke="#333333"/>'
        '<line x1="100" y1="100" x2="130" y2="100" stroke="#333333"/>'
    )
    syms = exact_match_groups(parse_svg(svg(body)).elements)
    assert len(syms) == 1
    channels = syms[0].shape_channels
    ids = syms[0].member_ids
    assert channels[ids[0]].scale_factor == 1.0
    assert channels[ids[1]].scale_factor == pytest.approx(2.0)
    assert channels[ids[1]].rotation == pytest.approx(90.0)
    assert channels[ids[2]].scale_factor == pytest.approx(3.0)


# --------------------------------------------------------------------------
# descriptors


def test_unit_square_descriptor_all_ones():
    desc = centroid_vertices_descriptor(Polygon([(0, 0), (1, 0), (1, 1), (0, 1)]))
    assert desc.vertex_count == 4
    assert all(d == pytest.approx(1.0, abs=1e-9) for d in desc.distances)


def test_descriptor_invariant_to_rotation_and_scale():
    square = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    t = Affine.translate(9, -4) @ Affine.rotate(30) @ Affine.scale(3)
    moved = Polygon([t.apply(*p) for p in square.vertices])
    a = centroid_vertices_descriptor(square)
    b = centroid_vertices_descriptor(moved)
    assert a.distances == pytest.approx(b.distances, abs=1e-9)


def test_descriptor_cyclic_start_invariance():
    square = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    shifted = Polygon([(1, 0), (1, 1), (0, 1), (0, 0)])
    assert descriptor_match(
        centroid_vertices_descriptor(square), centroid_vertices_descriptor(shifted)
    )


def test_descriptor_vertex_count_mismatch():
    tri = centroid_vertices_descriptor(Polygon([(0, 0), (2, 0), (1, 2)]))
    sq = centroid_vertices_descriptor(Polygon([(0, 0), (1, 0), (1, 1), (0, 1)]))
    assert not descriptor_match(tri, sq)


def test_descriptor_distinguishes_elongated_hexagon():
    hexagon = Polygon(
        [(math.cos(a), math.sin(a)) for a in [k * math.pi / 3 for k in range(6)]]
    )
    stretched = Polygon([(2 * x, y) for x, y in hexagon.vertices])
    assert not descriptor_match(
        centroid_vertices_descriptor(hexagon), centroid_vertices_descriptor(stretched)
    )


@st.composite
def random_polygon(draw):
    n = draw(st.integers(4, 10))
    # star-shaped polygon: strictly increasing angles with random radii
    angles = sorted(draw(st.lists(st.floats(0, 2 * math.pi - 0.1), min_size=n, max_size=n, unique=True)))
    radii = draw(st.lists(st.floats(0.5, 5.0), min_size=n, max_size=n))
    return Polygon([(r * math.cos(a), r * math.sin(a)) for a, r in zip(angles, radii)])


@given(
    random_polygon(),
    st.floats(-360, 360),
    st.floats(0.1, 20),
    st.floats(-100, 100),
    st.floats(-100, 100),
)
@settings(max_examples=60, deadline=None)
def test_descriptor_invariance_property(poly, deg, scale, tx, ty):
    t = Affine.translate(tx, ty) @ Affine.rotate(deg) @ Affine.scale(scale)
    moved = Polygon([t.apply(*p) for p in poly.vertices])
    a = centroid_vertices_descriptor(poly)
    b = centroid_vertices_descriptor(moved)
    assert descriptor_match(a, b, tol=1e-6)


@given(random_polygon(), random_polygon(), st.floats(1e-6, 0.5), st.floats(1.0, 10.0))
@settings(max_examples=60, deadline=None)
def test_descriptor_match_monotone_in_tol(p1, p2, tol, factor):
    # raising the tolerance never splits a matching pair
    a = centroid_vertices_descriptor(p1)
    b = centroid_vertices_descriptor(p2)
    if descriptor_match(a, b, tol=tol):
        assert descriptor_match(a, b, tol=tol * factor)


# --------------------------------------------------------------------------
# transformed matching

ARROW = "M0 0 L6 0 L6 -2 L10 1 L6 4 L6 2 L0 2 Z"


def rotated_arrow_path(deg: float, scale: float = 1.0, origin=(0.0, 1.0)) -> str:
    """Bake rotation+scale directly into the d attribute."""
    t = Affine.rotate(deg, *origin) @ Affine.scale(scale, scale)
    from legendgen.svgdoc import parse_path_data

    pts = []
    sub = parse_path_data(ARROW)[0]
    for seg in sub.segments:
        pts.append(t.apply(seg[1], seg[2]))
    pts.append(t.apply(*sub.start_point()))
    d = "M " + " L ".join(f"{x:.6f} {y:.6f}" for x, y in pts[:-1]) + " Z"
    return d


def test_rotated_arrows_grouped_with_recovered_rotation():
    angles = [0, 37, 80, 123, 170, 211, 260, 305]
    body = "".join(
        f'<path d="{rotated_arrow_path(a)}" fill="#555555" transform="translate({i * 22},40)"/>'
        for i, a in enumerate(angles)
    )
    scene = parse_svg(svg(body))
    syms = transformed_match_groups(scene.elements)
    assert len(syms) == 1
    sym = syms[0]
    assert len(sym.member_ids) == 8
    for mid, expected in zip(sym.member_ids, angles):
        got = sym.shape_channels[mid].rotation % 360
        delta = min(abs(got - expected), 360 - abs(got - expected))
        assert delta < 2.0, (mid, got, expected)


def test_scaled_arrows_recover_scale():
    body = "".join(
        f'<path d="{rotated_arrow_path(15 * i, scale=(i + 1))}" fill="#555555"/>'
        for i in range(8)
    )
    scene = parse_svg(svg(body, w=400, h=400))
    syms = transformed_match_groups(scene.elements)
    assert len(syms) == 1
    sym = syms[0]
    for i, mid in enumerate(sym.member_ids):
        assert sym.shape_channels[mid].scale_factor == pytest.approx(i + 1, rel=0.01)


def test_unrelated_paths_stay_singletons():
    body = (
        f'<path d="{rotated_arrow_path(0)}" fill="#000000"/>'
        '<path d="M0 0 L4 1 L5 4 L2 6 L-1 4 Z" fill="#000000"/>'
    )
    scene = parse_svg(svg(body))
    assert transformed_match_groups(scene.elements) == []


# --------------------------------------------------------------------------
# fuzzy clustering


def blob_path(cx: float, cy: float, r: float, wobble: float, seed: int) -> str:
    import random

    rng = random.Random(seed)
    pts = []
    n = 14
    for k in range(n):
        a = 2 * math.pi * k / n
        rr = r * (1 + wobble * (rng.random() - 0.5))
        pts.append((cx + rr * math.cos(a), cy + rr * 0.9 * math.sin(a)))
    return "M " + " L ".join(f"{x:.4f} {y:.4f}" for x, y in pts) + " Z"


def test_fuzzy_cluster_drops_outliers():
    body = "".join(
        f'<path d="{blob_path(20 + (i % 6) * 30, 20 + (i // 6) * 28, 10 + 0.08 * i, 0.25, i)}" fill="#808080"/>'
        for i in range(30)
    )
    body += f'<path d="{blob_path(100, 100, 200, 0.0, 99)}" fill="#808080"/>'
    body += '<path d="M0 0 L300 0 L300 1 L0 1 Z" fill="#808080"/>'
    scene = parse_svg(svg(body, w=400, h=400))
    syms = fuzzy_cluster(scene.elements, FuzzyClusterParams())
    assert len(syms) == 1
    assert len(syms[0].member_ids) == 30
    assert syms[0].match_stage == "fuzzy"


def test_fuzzy_identical_paths_single_cluster():
    body = "".join(
        f'<path d="M{i * 12} 0 L{i * 12 + 8} 0 L{i * 12 + 4} 7 Z" fill="#808080"/>'
        for i in range(6)
    )
    scene = parse_svg(svg(body))
    syms = fuzzy_cluster(scene.elements, FuzzyClusterParams())
    assert len(syms) == 1
    assert len(syms[0].member_ids) == 6


def test_fuzzy_representative_is_median_area_member():
    body = "".join(
        f'<path d="{blob_path(20 + (i % 6) * 30, 20 + (i // 6) * 28, 10 + 0.08 * i, 0.25, i)}" fill="#808080"/>'
        for i in range(30)
    )
    body += f'<path d="{blob_path(100, 100, 200, 0.0, 99)}" fill="#808080"/>'
    body += '<path d="M0 0 L300 0 L300 1 L0 1 Z" fill="#808080"/>'
    scene = parse_svg(svg(body, w=400, h=400))
    syms = fuzzy_cluster(scene.elements, FuzzyClusterParams())
    assert len(syms) == 1
    members = syms[0].member_ids
    assert len(members) == 30
    areas = {
        el.id: flatten_path(el).area()
        for el in scene.elements
        if el.id in members
    }
    ranked = sorted(members, key=lambda m: (areas[m], m))
    assert syms[0].representative_id == ranked[len(ranked) // 2]


# --------------------------------------------------------------------------
# full pipeline


def test_pipeline_excludes_axes_and_text():
    bars = "".join(
        f'<rect x="{20 + i * 20}" y="{100 - 6 * (i + 1)}" width="12" height="{6 * (i + 1)}" fill="#4477aa"/>'
        for i in range(12)
    )
    axes = (
        '<line x1="10" y1="140" x2="195" y2="140" stroke="#000000"/>'
        '<line x1="10" y1="5" x2="10" y2="140" stroke="#000000"/>'
    )
    texts = "".join(f'<text x="{20 + i * 20}" y="148" font-size="7">t{i}</text>' for i in range(12))
    background = '<rect x="0" y="0" width="200" height="150" fill="#fafafa"/>'
    scene = parse_svg(svg(background + axes + bars + texts))
    syms = extract_symbols(scene)
    assert len(syms) == 1
    assert len(syms[0].member_ids) == 12
    assert all("rect" == scene.element_by_id(m).kind for m in syms[0].member_ids)


def test_pipeline_no_symbols_raises():
    scene = parse_svg(svg(
        '<line x1="0" y1="149" x2="200" y2="149" stroke="#000000"/>'
        '<text x="50" y="10" font-size="10">title</text>'
    ))
    with pytest.raises(NoSymbolsFound):
        extract_symbols(scene)


def test_pipeline_stages_are_disjoint_and_deterministic():
    bars = "".join(
        f'<rect x="{20 + i * 20}" y="40" width="12" height="50" fill="#4477aa"/>'
        for i in range(5)
    )
    arrows = "".join(
        f'<path d="{rotated_arrow_path(30 * i)}" fill="#999999" transform="translate({20 + i * 30},120)"/>'
        for i in range(4)
    )
    scene = parse_svg(svg(bars + arrows))
    first = extract_symbols(scene)
    second = extract_symbols(scene)
    seen = set()
    for sym in first:
        for mid in sym.member_ids:
            assert mid not in seen
            seen.add(mid)
    assert [s.member_ids for s in first] == [s.member_ids for s in second]
    assert [s.representative_id for s in first] == [s.representative_id for s in second]

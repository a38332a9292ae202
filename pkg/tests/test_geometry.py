import math

import pytest
from hypothesis import given, settings, strategies as st

from legendgen.errors import DegeneratePath
from legendgen.geometry import Affine, Polygon, flatten_subpath
from legendgen.svgdoc import parse_path_data


def flatten_d(d: str, samples: int = 8, transform: Affine = Affine.identity()) -> Polygon:
    subpaths = parse_path_data(d)
    assert len(subpaths) == 1
    return flatten_subpath(subpaths[0], transform, samples)


def test_straight_path_kept_verbatim():
    poly = flatten_d("M0 0 L1 0 L1 1 Z")
    assert poly.closed
    assert poly.vertices == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]


def test_coarsest_sampling_keeps_endpoints_only():
    poly = flatten_d("M0 0 Q1 2 2 0", samples=2)
    assert poly.vertices == [(0.0, 0.0), (2.0, 0.0)]


def circle_path(r: float = 1.0) -> str:
    return (
        f"M{r} 0 "
        f"A{r} {r} 0 0 1 0 {r} "
        f"A{r} {r} 0 0 1 {-r} 0 "
        f"A{r} {r} 0 0 1 0 {-r} "
        f"A{r} {r} 0 0 1 {r} 0 Z"
    )


def test_unit_circle_flattening_radii():
    poly = flatten_d(circle_path(), samples=8)
    # 4 arcs at 8 chord points each; shared junctions merge
    assert len(poly.vertices) == 28
    for x, y in poly.vertices:
        assert math.hypot(x, y) == pytest.approx(1.0, abs=0.02)


def hausdorff_to_unit_circle(poly: Polygon) -> float:
    worst = 0.0
    verts = poly.vertices
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        mx, my = (x0 + x1) / 2, (y0 + y1) / 2
        worst = max(worst, abs(1.0 - math.hypot(mx, my)))
    return worst


def test_monotone_refinement_on_circle():
    prev = math.inf
    for samples in (2, 3, 4, 6, 8, 12, 16):
        poly = flatten_d(circle_path(), samples=samples)
        h = hausdorff_to_unit_circle(poly)
        assert h <= prev + 1e-12
        prev = h


def test_degenerate_path_rejected():
    with pytest.raises(DegeneratePath):
        flatten_d("M1 1 L1 1 L1 1 Z")


def test_transform_applied_during_flatten():
    t = Affine.translate(5, 0) @ Affine.scale(2)
    poly = flatten_d("M0 0 L1 0 L1 1 Z", transform=t)
    assert poly.vertices == [(5.0, 0.0), (7.0, 0.0), (7.0, 2.0)]


def test_duplicate_vertices_merged():
    poly = flatten_d("M0 0 L0 0 L1 0 L1 0 L1 1 Z")
    assert poly.vertices == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]


@given(
    st.floats(-100, 100), st.floats(-100, 100),
    st.floats(0.1, 50), st.floats(-360, 360),
)
@settings(max_examples=50)
def test_affine_inverse_round_trip(tx, ty, s, deg):
    t = Affine.translate(tx, ty) @ Affine.rotate(deg) @ Affine.scale(s)
    inv = t.inverse()
    x, y = inv.apply(*t.apply(3.7, -2.2))
    assert x == pytest.approx(3.7, abs=1e-6)
    assert y == pytest.approx(-2.2, abs=1e-6)


def test_similarity_decomposition():
    t = Affine.translate(4, 5) @ Affine.rotate(30) @ Affine.scale(2.5)
    dec = t.decompose_similarity()
    assert dec is not None
    s, deg = dec
    assert s == pytest.approx(2.5, abs=1e-9)
    assert deg == pytest.approx(30.0, abs=1e-9)
    assert Affine.scale(2, 1).decompose_similarity() is None


def test_rotated_square_area_preserved():
    sq = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert sq.area() == pytest.approx(1.0)
    t = Affine.rotate(45, 0.5, 0.5)
    rotated = Polygon([t.apply(*p) for p in sq.vertices])
    assert rotated.area() == pytest.approx(1.0, abs=1e-9)

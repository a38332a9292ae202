import numpy as np
import pytest
from hypothesis import given, strategies as st
from skimage import color as skcolor

from legendgen.labcolor import (
    LabColor,
    hue_angle_deg,
    lab_to_rgb,
    relative_luminance,
    rgb_to_lab,
)


def test_white_point():
    lab = rgb_to_lab((255, 255, 255))
    assert lab.L == pytest.approx(100.0, abs=0.01)
    assert lab.a == pytest.approx(0.0, abs=0.01)
    assert lab.b == pytest.approx(0.0, abs=0.01)


def test_black():
    lab = rgb_to_lab((0, 0, 0))
    assert lab.L == pytest.approx(0.0, abs=1e-9)
    assert lab.a == pytest.approx(0.0, abs=1e-9)
    assert lab.b == pytest.approx(0.0, abs=1e-9)


def test_pure_red_reference():
    # standard sRGB/D65 reference values
    lab = rgb_to_lab((255, 0, 0))
    assert lab.L == pytest.approx(53.24, abs=0.05)
    assert lab.a == pytest.approx(80.09, abs=0.1)
    assert lab.b == pytest.approx(67.20, abs=0.1)


@given(st.tuples(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255)))
def test_matches_skimage(rgb):
    ours = rgb_to_lab(rgb)
    ref = skcolor.rgb2lab(np.array([[rgb]], dtype=np.float64) / 255.0)[0, 0]
    assert ours.L == pytest.approx(ref[0], abs=0.05)
    assert ours.a == pytest.approx(ref[1], abs=0.05)
    assert ours.b == pytest.approx(ref[2], abs=0.05)


@given(st.tuples(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255)))
def test_round_trip_within_two_steps(rgb):
    back = lab_to_rgb(rgb_to_lab(rgb))
    for ours, orig in zip(back, rgb):
        assert abs(ours - orig) <= 2


def test_hue_angle_quadrants():
    assert hue_angle_deg(LabColor(50, 10, 0)) == pytest.approx(0.0)
    assert hue_angle_deg(LabColor(50, 0, 10)) == pytest.approx(90.0)
    assert hue_angle_deg(LabColor(50, -10, 0)) == pytest.approx(180.0)


def test_relative_luminance_extremes():
    assert relative_luminance((255, 255, 255)) == pytest.approx(1.0)
    assert relative_luminance((0, 0, 0)) == pytest.approx(0.0)
